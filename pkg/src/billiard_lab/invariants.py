"""Local singularity invariants of plane curves and the global identities they satisfy.

For each point of a projective curve the branches come from the Puiseux
engine. The class ``kappa`` is the intersection number with a polar curve,
``delta`` follows from ``kappa`` and the branch multiplicities, and ``h`` is
the intersection number with the projective Hessian. Genus and the
Hessian count ``3d(d-2) = sum h`` are then global checks on the local data.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import sympy

from .polycore import BivariatePolynomial, HomogeneousPolynomial, homogenize, mp_roots, projective_hessian
from .puiseux import WORK_DPS, PuiseuxBranch, PuiseuxError, TruncationBudgetError, compose_affine, infinity_points, puiseux_branches

MAX_SHEAR = 7
INTEGRALITY_TOL = 1e-4


class InvariantError(ValueError):
    pass


class DegenerateHessianError(InvariantError):
    pass


class IntegralityError(InvariantError):
    pass


class ShearError(InvariantError):
    pass


# -- orders along a branch ---------------------------------------------------------------


def _mp_terms(g):
    if isinstance(g, BivariatePolynomial):
        return {k: mpmath.mpf(c.numerator) / c.denominator for k, c in g.terms.items()}
    return dict(g)


def _series_mul(a, b, n):
    out = [mpmath.mpf(0)] * n
    for i, x in enumerate(a[:n]):
        if x == 0:
            continue
        for j in range(min(len(b), n - i)):
            out[i + j] += x * b[j]
    return out


def _order_along(g, b: PuiseuxBranch) -> int | float:
    """Vanishing order in t of g(point_at(t)); ``math.inf`` when no term survives."""
    with mpmath.workdps(WORK_DPS):
        A, d, e = b._mp_point, b._mp_tangent, b._mp_frame
        G = compose_affine(_mp_terms(g), (A[0], d[0], e[0]), (A[1], d[1], e[1]))
        scale = max((abs(c) for c in G.values()), default=mpmath.mpf(0))
        if scale == 0:
            return math.inf
        top_v = max((k for k, _ in b.t_series), default=0)
        deg_u = max(i for i, _ in G)
        deg_v = max(j for _, j in G)
        # a terminating series is a polynomial: every order can be computed
        N = (b.q * deg_u + top_v * deg_v + 1) if b.exact else b.order + 1
        v = [mpmath.mpf(0)] * N
        for k, a in b.t_series:
            if k < N:
                v[k] = a
        vpow = [[mpmath.mpf(1)] + [mpmath.mpf(0)] * (N - 1)]
        for _ in range(deg_v):
            vpow.append(_series_mul(vpow[-1], v, N))
        total = [mpmath.mpf(0)] * N
        for (i, j), a in G.items():
            shift = b.q * i
            if shift >= N:
                continue
            row = vpow[j]
            for k in range(N - shift):
                if row[k] != 0:
                    total[shift + k] += a * row[k]
        growth = max([mpmath.mpf(1)] + [abs(a) ** (mpmath.mpf(1) / k) for k, a in b.t_series if k > 0])
        eps = mpmath.mpf(10) ** (-int(WORK_DPS * 0.3)) * scale
        for k, c in enumerate(total):
            if abs(c) > eps * growth**k:
                return k
        return math.inf


def intersection_multiplicity(g: BivariatePolynomial, b: PuiseuxBranch) -> int | float:
    """Order in the branch parameter of ``g`` restricted to the branch.

    Returns ``math.inf`` if every computed term vanishes. For a truncated
    branch only orders up to its truncation are meaningful, so an infinite
    answer from a truncated branch raises :class:`TruncationBudgetError`.
    """
    k = _order_along(g, b)
    if k == math.inf and not b.exact:
        raise TruncationBudgetError(f"order exceeds the truncation {b.order}; expand further")
    return k


def branch_multiplicities(b: PuiseuxBranch, certify: bool = True) -> tuple[int, int]:
    """(s, s*) = (q, p - q). With ``certify``, s is confirmed as the order of a transversal line."""
    if b.is_line:
        raise InvariantError("a line germ has no finite dual multiplicity")
    if certify:
        with mpmath.workdps(WORK_DPS):
            A, d, e = b._mp_point, b._mp_tangent, b._mp_frame
            # a line through A whose direction d + e is not the tangent
            w = (d[0] + e[0], d[1] + e[1])
            line = {(1, 0): w[1], (0, 1): -w[0], (0, 0): w[0] * A[1] - w[1] * A[0]}
        transversal = _order_along(line, b)
        tangent_line = {(1, 0): d[1], (0, 1): -d[0], (0, 0): d[0] * A[1] - d[1] * A[0]}
        tangential = _order_along(tangent_line, b)
        if transversal != b.q or tangential != b.p:
            raise InvariantError(f"branch contact orders ({transversal}, {tangential}) disagree with (q, p) = ({b.q}, {b.p})")
    return b.q, b.p - b.q


# -- local invariants -------------------------------------------------------------


def _vertical_is_tangent(lam, branches) -> bool:
    for b in branches:
        d0, d1 = b.tangent
        if abs(d0 - lam * d1) < 1e-9 * max(abs(d0), abs(d1)):
            return True
    return False


def polar_shear(branches, seed: int = 0) -> int:
    """lambda such that the direction (lambda, 1) is tangent to none of the branches.

    0 is tried first, then 1..MAX_SHEAR in a seeded random order.
    """
    order = list(range(1, MAX_SHEAR + 1))
    random.Random(seed).shuffle(order)
    for lam in [0] + order:
        if not _vertical_is_tangent(lam, branches):
            return lam
    raise ShearError("every trial shear makes the polar direction tangent to a branch")


def kappa(f: BivariatePolynomial, branches, seed: int = 0) -> tuple[int, int]:
    """(kappa, lambda): intersection number of the branches with the polar lambda f_x + f_y.

    ``lambda f_x + f_y`` is d/dY of f after the shear x = X + lambda Y, so this is
    the y-polar of the sheared curve, whose y-axis is tangent to no branch.
    """
    lam = polar_shear(branches, seed)
    polar = f.diff(0) * lam + f.diff(1)
    total = 0
    for b in branches:
        k = intersection_multiplicity(polar, b)
        if k == math.inf:
            raise InvariantError("the polar contains a branch; the curve is not reduced")
        total += k
    return total, lam


def delta(kappa_value: int, multiplicities) -> int:
    """(kappa - sum(s - 1)) / 2, which must be a nonnegative integer."""
    twice = kappa_value - sum(s - 1 for s, _ in multiplicities)
    if abs(twice / 2 - round(twice / 2)) > INTEGRALITY_TOL or twice % 2:
        raise IntegralityError(f"kappa - sum(s-1) = {twice} is odd")
    if twice < 0:
        raise IntegralityError(f"negative delta from kappa = {kappa_value}")
    return twice // 2


def hessian_invariant(hessian_chart: BivariatePolynomial, branches) -> int:
    """Sum over the branches of the vanishing order of the Hessian form."""
    total = 0
    for b in branches:
        k = intersection_multiplicity(hessian_chart, b)
        if k == math.inf:
            raise DegenerateHessianError("a branch lies on the Hessian curve")
        total += k
    return total


def hessian_from_class(kappa_value: int, multiplicities) -> int:
    return 3 * kappa_value + sum(ss - s for s, ss in multiplicities)


# -- records -----------------------------------------------------------------


def _cplx(z):
    z = complex(z)
    return [z.real, z.imag]


@dataclass
class PointInvariantRecord:
    point: tuple  # homogeneous coordinates
    chart: int
    chart_point: tuple
    branches: list  # (s, s*) per branch
    kappa: int
    delta: int
    hessian_h: int
    hessian_h_from_class: int
    polar_shear: int
    at_infinity: bool
    branch_data: list = field(default_factory=list, repr=False)

    @property
    def consistent(self) -> bool:
        return self.hessian_h == self.hessian_h_from_class

    @property
    def is_singular(self) -> bool:
        return self.delta > 0

    @property
    def is_inflection(self) -> bool:
        return self.delta == 0 and self.hessian_h > 0

    def to_dict(self) -> dict:
        return {
            "point": [_cplx(z) for z in self.point],
            "chart": self.chart,
            "chart_point": [_cplx(z) for z in self.chart_point],
            "branches": [list(sb) for sb in self.branches],
            "kappa": self.kappa,
            "delta": self.delta,
            "hessian_h": self.hessian_h,
            "hessian_h_from_class": self.hessian_h_from_class,
            "polar_shear": self.polar_shear,
            "at_infinity": self.at_infinity,
        }


@dataclass
class CurveInvariantReport:
    equation: str
    degree: int
    points: list
    genus: int
    pluecker_residual: int

    @property
    def delta_total(self) -> int:
        return sum(r.delta for r in self.points)

    @property
    def hessian_total(self) -> int:
        return sum(r.hessian_h for r in self.points)

    @property
    def consistent(self) -> bool:
        return all(r.consistent for r in self.points)

    def notable_points(self):
        return [r for r in self.points if r.kappa or r.hessian_h]

    def to_dict(self) -> dict:
        return {
            "equation": self.equation,
            "degree": self.degree,
            "genus": self.genus,
            "pluecker_residual": self.pluecker_residual,
            "delta_total": self.delta_total,
            "hessian_total": self.hessian_total,
            "consistent": self.consistent,
            "points": [r.to_dict() for r in self.notable_points()],
        }


def point_record(F: HomogeneousPolynomial, H: HomogeneousPolynomial, chart: int, chart_point, hom, order: int, seed: int = 0) -> PointInvariantRecord:
    f = F.dehomogenize(chart)
    branches = puiseux_branches(f, chart_point, order=order, chart=chart, homogeneous_point=hom)
    mults = [branch_multiplicities(b) for b in branches]
    k, lam = kappa(f, branches, seed)
    dl = delta(k, mults)
    h = hessian_invariant(H.dehomogenize(chart), branches)
    return PointInvariantRecord(
        point=tuple(complex(z) for z in hom),
        chart=chart,
        chart_point=tuple(complex(z) for z in chart_point),
        branches=mults,
        kappa=k,
        delta=dl,
        hessian_h=h,
        hessian_h_from_class=hessian_from_class(k, mults),
        polar_shear=lam,
        at_infinity=chart != 0,
        branch_data=branches,
    )


# -- locating the points that carry invariants ---------------------------------------------


def _to_sympy(p: BivariatePolynomial, x, y):
    return sum(sympy.Rational(c.numerator, c.denominator) * x**i * y**j for (i, j), c in p.terms.items())


def _eval_mp(p: BivariatePolynomial, x, y):
    val = mpmath.mpf(0)
    scale = mpmath.mpf(0)
    for (i, j), c in p.terms.items():
        m = (mpmath.mpf(c.numerator) / c.denominator) * x**i * y**j
        val += m
        scale += abs(m)
    return val, scale


def affine_common_points(f: BivariatePolynomial, h: BivariatePolynomial):
    """Common zeros of f and h in the affine chart, as mp pairs at WORK_DPS.

    x-coordinates are roots of the squarefree part of the resultant in y;
    over each one the roots of f(x, .) are kept where h also vanishes.
    """
    if h.total_degree <= 0:
        return []
    X, Y = sympy.symbols("x y")
    fs, hs = _to_sympy(f, X, Y), _to_sympy(h, X, Y)
    if sympy.degree(fs, Y) == 0:
        raise InvariantError("equation does not involve y; swap the coordinates")
    res = sympy.Poly(sympy.resultant(fs, hs, Y), X)
    if res.is_zero:
        raise InvariantError("the curve and its Hessian share a component")
    if res.degree() < 1:
        return []
    sq = sympy.Poly(sympy.quo(res, sympy.gcd(res, res.diff(X))), X)
    coeffs = [sympy.Rational(c) for c in reversed(sq.all_coeffs())]
    out = []
    with mpmath.workdps(WORK_DPS):
        xs = mp_roots([mpmath.mpf(c.p) / c.q for c in coeffs])
        for xi, _ in xs:
            col = [mpmath.mpf(0)] * (f.degree_in(1) + 1)
            for (i, j), c in f.terms.items():
                col[j] += (mpmath.mpf(c.numerator) / c.denominator) * xi**i
            # xi carries ~WORK_DPS digits, so tiny coefficients are cancellations
            top = max(abs(c) for c in col)
            col = [c if abs(c) > top * mpmath.mpf(10) ** -50 else mpmath.mpf(0) for c in col]
            while len(col) > 1 and col[-1] == 0:
                col.pop()
            if len(col) < 2:
                continue
            for yv, _ in mp_roots(col):
                val, scale = _eval_mp(h, xi, yv)
                if abs(val) <= mpmath.mpf(10) ** -30 * max(scale, 1):
                    out.append((_tidy(xi), _tidy(yv)))
    return out


def _tidy(z):
    z = mpmath.mpc(z)
    tiny = mpmath.mpf(10) ** -50
    re = z.real if abs(z.real) > tiny else mpmath.mpf(0)
    im = z.imag if abs(z.imag) > tiny else mpmath.mpf(0)
    return mpmath.mpc(re, im) if im else re


def default_order(d: int) -> int:
    """Series truncation that leaves room for the largest possible Hessian order."""
    return 3 * d * (d - 2) + d + 2


def analyze_curve(F, seed: int = 0, order: int | None = None) -> CurveInvariantReport:
    """Invariants at every point where the curve meets its Hessian or the line at infinity."""
    if isinstance(F, BivariatePolynomial):
        F = homogenize(F, F.degree)
    d = F.degree
    if d < 2:
        raise DegenerateHessianError("lines have no Hessian curve")
    H = projective_hessian(F)
    if H.is_zero():
        raise DegenerateHessianError("Hessian vanishes identically (the curve contains a line)")
    K = order if order is not None else default_order(d)
    records = []
    f, h = F.dehomogenize(0), H.dehomogenize(0)
    with mpmath.workdps(WORK_DPS):
        for x, y in affine_common_points(f, h):
            records.append(point_record(F, H, 0, (x, y), (mpmath.mpf(1), x, y), K, seed))
        for chart, pt, hom, _ in infinity_points(F):
            records.append(point_record(F, H, chart, pt, hom, K, seed))
    g2 = (d - 1) * (d - 2)
    genus = Fraction(g2, 2) - sum(r.delta for r in records)
    if genus.denominator != 1:  # pragma: no cover - (d-1)(d-2) is even
        raise IntegralityError("genus is not an integer")
    return CurveInvariantReport(
        equation=str(F),
        degree=d,
        points=records,
        genus=int(genus),
        pluecker_residual=3 * d * (d - 2) - sum(r.hessian_h for r in records),
    )


def pluecker_check(F, seed: int = 0) -> int:
    return analyze_curve(F, seed).pluecker_residual


def genus(report: CurveInvariantReport) -> int:
    if report.genus < 0:
        raise InvariantError(f"negative genus {report.genus}: a singular point was missed or the curve is reducible")
    return report.genus


__all__ = [
    "CurveInvariantReport",
    "DegenerateHessianError",
    "IntegralityError",
    "InvariantError",
    "PointInvariantRecord",
    "PuiseuxError",
    "ShearError",
    "analyze_curve",
    "branch_multiplicities",
    "delta",
    "genus",
    "hessian_invariant",
    "intersection_multiplicity",
    "kappa",
    "pluecker_check",
]
