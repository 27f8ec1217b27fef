"""Numerical toolkit for group-valued momentum maps."""

__version__ = "0.1.0"
