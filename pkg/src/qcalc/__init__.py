"""Exact computations for q-deformed differential operators in characteristic p."""

__version__ = "0.1.0"
