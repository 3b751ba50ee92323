"""Numerical and exact tools for elliptic scrolls and their bielliptic smoothings."""

__version__ = "0.1.0"
