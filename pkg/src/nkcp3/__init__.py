"""Numerical toolkit for homogeneous special Lagrangians in the nearly Kaehler CP^3."""

__version__ = "0.1.0"
