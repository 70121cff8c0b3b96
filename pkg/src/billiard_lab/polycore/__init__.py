"""Exact polynomial arithmetic, text parsing and complex root extraction."""

from .parse import NonRationalLiteralError, ParseError, UnknownVariableError, parse_homogeneous, parse_polynomial
from .poly import (
    BivariatePolynomial,
    HomogeneousPolynomial,
    dehomogenize,
    homogenize,
    projective_hessian,
    skew_hessian,
    taylor_coefficients,
)
from .roots import RootFindingError, RootMultiset, UnivariateComplexPolynomial, mp_roots, roots

__all__ = [
    "BivariatePolynomial",
    "HomogeneousPolynomial",
    "NonRationalLiteralError",
    "ParseError",
    "RootFindingError",
    "RootMultiset",
    "UnivariateComplexPolynomial",
    "UnknownVariableError",
    "dehomogenize",
    "homogenize",
    "parse_homogeneous",
    "parse_polynomial",
    "projective_hessian",
    "mp_roots",
    "roots",
    "skew_hessian",
    "taylor_coefficients",
]
