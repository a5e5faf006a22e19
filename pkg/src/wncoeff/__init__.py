"""Exact Walter Neumann coefficients of factor-free subgroups of free products."""

__version__ = "0.1.0"
