"""Numerical certificates of strong starlikeness for normalized power series."""

__version__ = "0.1.0"
