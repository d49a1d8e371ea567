"""Numerical laboratory for the log-modified Hardy-Littlewood integral and Jacob's ladders."""

__version__ = "0.1.0"
