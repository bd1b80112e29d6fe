"""Numerical toolkit for rational-map dynamics with bubble-type Julia sets."""

from .rmap import INF, Cycle, Polynomial, RationalMap, is_inf

__all__ = ["INF", "Cycle", "Polynomial", "RationalMap", "is_inf"]

__version__ = "0.1.0"
