"""Exact bounds for sphere sets avoiding a fixed inner product."""
from fractions import Fraction

from .exact import AlgebraicReal, FieldSpec, RatInterval, Sign, alg_sign

__all__ = ["AlgebraicReal", "FieldSpec", "Fraction", "RatInterval", "Sign", "alg_sign"]
__version__ = "0.1.0"
