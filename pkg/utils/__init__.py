# Run log
