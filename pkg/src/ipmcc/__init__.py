"""Correntropy-criterion adaptive filters for sparse system identification."""

__version__ = "0.1.0"
