"""Extension-property checks for small matroids and polymatroids."""

__version__ = "0.1.0"
