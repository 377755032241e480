# Analysis pipelines package
