"""Variance of linear statistics of zeros of random SU(2) polynomials on CP^1."""

__version__ = "0.1.0"
