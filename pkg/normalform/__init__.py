# Normalform package
