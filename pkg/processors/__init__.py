# Processors package
