"""Exact computations with curved L-infinity algebras and algebroids."""

__version__ = "0.1.0"
