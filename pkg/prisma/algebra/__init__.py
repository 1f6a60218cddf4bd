# Algebra Package
