"""Generalized Veech skew products over circle rotations."""

__version__ = "0.1.0"
