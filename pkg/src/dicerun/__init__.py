"""Exact and high-precision analysis of waiting times for increasing runs of dice rolls."""

from dicerun.errors import DomainError, InternalInconsistency, PoleProximity, SingularMatrix
from dicerun.exact import (
    ABPair,
    GcdReport,
    PolynomialZ,
    SqrtM3Number,
    a_closed,
    a_eval,
    a_eval_fast,
    a_poly,
    ab_eval,
    e2,
    e3,
    e3_unreduced,
    gcd_report,
    nu2,
)

__version__ = "0.1.0"

__all__ = [
    "ABPair",
    "DomainError",
    "GcdReport",
    "InternalInconsistency",
    "PoleProximity",
    "PolynomialZ",
    "SingularMatrix",
    "SqrtM3Number",
    "a_closed",
    "a_eval",
    "a_eval_fast",
    "a_poly",
    "ab_eval",
    "e2",
    "e3",
    "e3_unreduced",
    "gcd_report",
    "nu2",
    "__version__",
]
