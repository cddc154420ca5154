"""Numerical laboratory for operator Hölder-Zygmund estimates on matrices."""

__version__ = "0.1.0"
