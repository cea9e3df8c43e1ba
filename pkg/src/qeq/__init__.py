"""Linear quantum expressions with an equational theory checked against density-matrix semantics."""

__version__ = "0.1.0"
