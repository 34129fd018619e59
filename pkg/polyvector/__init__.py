# Polyvector package
