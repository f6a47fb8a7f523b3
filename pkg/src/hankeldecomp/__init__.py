"""Decomposition of homogeneous polynomials over Q by Hankel operators.

Three notions of rank are supported: Waring (sums of powers of linear
forms), tangential (pieces L^(d-1) M) and cactus (L^(d-k+1) N).
"""

from .config import Config
from .decompose import DecompositionReport, cactus, tangential, verify, waring
from .errors import DecompError
from .parsing import format_polynomial, parse_polynomial
from .polyring import Polynomial

__all__ = [
    "Config",
    "DecompError",
    "DecompositionReport",
    "Polynomial",
    "cactus",
    "format_polynomial",
    "parse_polynomial",
    "tangential",
    "verify",
    "waring",
]
