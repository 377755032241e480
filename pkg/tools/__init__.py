# Kernel-method analysis tools
