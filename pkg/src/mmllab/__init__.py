"""Numerical laboratory for multilinear Fourier multipliers on periodized grids."""

__version__ = "0.1.0"
