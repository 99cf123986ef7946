"""Exact verification toolkit for FRT presentations of q-deformed classical groups."""

from .coeffring import Q, U, HalfLaurent, RatFunc, parse_ratfunc, qpow
from .freealg import NCMatrix, NCPoly, TensorPoly, Word, gen, parse_ncpoly, scalar, tgen
from .frtfamily import Presentation, build_presentation
from .idealcheck import CheckResult, battery, membership, tensor_membership
from .rmatrix import RTensor, Series, braid_check, build_R, rhat, rho

__version__ = "0.1.0"

__all__ = [
    "Q", "U", "HalfLaurent", "RatFunc", "parse_ratfunc", "qpow",
    "NCMatrix", "NCPoly", "TensorPoly", "Word", "gen", "parse_ncpoly", "scalar", "tgen",
    "Presentation", "build_presentation",
    "CheckResult", "battery", "membership", "tensor_membership",
    "RTensor", "Series", "braid_check", "build_R", "rhat", "rho",
]
