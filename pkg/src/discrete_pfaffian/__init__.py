"""Correlation kernels of discrete symplectic and orthogonal ensembles."""

__version__ = "0.1.0"
