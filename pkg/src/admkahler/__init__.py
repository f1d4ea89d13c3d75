"""Exact classification of extremal Kähler metrics on admissible projective bundles."""

from .exactpoly import RatPoly, rational
from .setup import AdmissibleSetup, FactorDatum, load_setup, validate
from .extremal import extremal_polynomial
from .classify import Verdict, VerdictKind, classify

__version__ = "0.1.0"

__all__ = [
    "AdmissibleSetup",
    "FactorDatum",
    "RatPoly",
    "Verdict",
    "VerdictKind",
    "classify",
    "extremal_polynomial",
    "load_setup",
    "rational",
    "validate",
]
