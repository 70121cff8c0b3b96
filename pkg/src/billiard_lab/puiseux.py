"""Newton polygons and Newton-Puiseux expansion of plane-curve branches.

Exponents come from exact lattice combinatorics; coefficients are computed in
mpmath at ``WORK_DPS`` digits. Every branch is written in a frame where its
tangent is the first axis: the base point is ``A``, the tangent direction
``d`` and the complementary direction ``e``, and the branch is

    A + u d + v e,   u = t^q,   v = c t^p + (higher powers of t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import mpmath

from .polycore import BivariatePolynomial, HomogeneousPolynomial, mp_roots

WORK_DPS = 80
MAX_SINGULAR_STAGES = 40


class PuiseuxError(ValueError):
    pass


class NotOnCurveError(PuiseuxError):
    pass


class NonReducedError(PuiseuxError):
    """A repeated factor was met: the expansion cannot separate the branches."""


class TruncationBudgetError(PuiseuxError):
    pass


# -- Newton polygon ---------------------------------------------------------


@dataclass(frozen=True)
class NewtonPolygonEdge:
    """Edge of the lower-left hull; ``start`` lies on the side of the first axis."""

    start: tuple[int, int]
    end: tuple[int, int]
    slope: Fraction  # (j_end - j_start) / (i_end - i_start), always negative
    monomials: tuple

    @property
    def exponent_ratio(self) -> Fraction:
        """gamma with v ~ u^gamma along the branches this edge describes."""
        return -1 / self.slope

    @property
    def lattice_length(self) -> int:
        return math.gcd(self.start[0] - self.end[0], self.end[1] - self.start[1])


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull_edges(support: Mapping[tuple[int, int], object]) -> list[NewtonPolygonEdge]:
    pts = sorted(support)
    jmin = min(j for _, j in pts)
    first = min(i for i, j in pts if j == jmin)
    lower: list[tuple[int, int]] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    # lower hull runs from the y-axis side; keep it up to the lowest point
    verts = lower[: lower.index((first, jmin)) + 1]
    verts.reverse()
    edges = []
    for a, b in zip(verts, verts[1:]):
        slope = Fraction(b[1] - a[1], b[0] - a[0])
        on_edge = tuple(
            sorted(
                ((pt, support[pt]) for pt in support if b[0] <= pt[0] <= a[0] and _cross(a, b, pt) == 0),
                key=lambda kv: -kv[0][0],
            )
        )
        edges.append(NewtonPolygonEdge(a, b, slope, on_edge))
    return edges


def newton_polygon(f) -> list[NewtonPolygonEdge]:
    """Compact edges of the Newton polygon of a germ at the origin.

    ``f`` is a :class:`BivariatePolynomial` or a mapping ``(i, j) -> coeff``.
    Edges are listed from the first-axis side; slopes strictly decrease.
    """
    terms = f.terms if isinstance(f, BivariatePolynomial) else f
    support = {k: v for k, v in terms.items() if v != 0}
    if not support:
        raise PuiseuxError("zero polynomial has no Newton polygon")
    if (0, 0) in support:
        raise NotOnCurveError("nonzero constant term: the origin is not on the curve")
    return _hull_edges(support)


# -- mp bivariate helpers ----------------------------------------------------

MpPoly = dict  # (i, j) -> mpc


def _mp(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, (mpmath.mpf, mpmath.mpc)):
        return x
    if isinstance(x, complex):
        return mpmath.mpc(x.real, x.imag)
    return mpmath.mpf(x) if isinstance(x, int) else mpmath.mpmathify(x)


def _mul(a: MpPoly, b: MpPoly) -> MpPoly:
    out: MpPoly = {}
    for (i1, j1), c1 in a.items():
        for (i2, j2), c2 in b.items():
            k = (i1 + i2, j1 + j2)
            out[k] = out.get(k, 0) + c1 * c2
    return out


def compose_affine(f, X, Y) -> MpPoly:
    """f(X0 + X1 u + X2 v, Y0 + Y1 u + Y2 v) as an mp polynomial in (u, v)."""
    terms = f.terms if isinstance(f, BivariatePolynomial) else f
    lx = {k: _mp(c) for k, c in zip([(0, 0), (1, 0), (0, 1)], X) if c != 0}
    ly = {k: _mp(c) for k, c in zip([(0, 0), (1, 0), (0, 1)], Y) if c != 0}
    px, py = [{(0, 0): mpmath.mpf(1)}], [{(0, 0): mpmath.mpf(1)}]
    out: MpPoly = {}
    for (i, j), c in terms.items():
        while len(px) <= i:
            px.append(_mul(px[-1], lx))
        while len(py) <= j:
            py.append(_mul(py[-1], ly))
        cc = _mp(c)
        for k, v in _mul(px[i], py[j]).items():
            out[k] = out.get(k, 0) + cc * v
    return out


def _zero_tol(G: MpPoly):
    scale = max((abs(c) for c in G.values()), default=mpmath.mpf(0))
    return scale * mpmath.mpf(10) ** (-int(mpmath.mp.dps * 0.6))


def _clean(G: MpPoly, tol=None) -> MpPoly:
    tol = _zero_tol(G) if tol is None else tol
    return {k: c for k, c in G.items() if abs(c) > tol}


# -- branch records ------------------------------------------------------


@dataclass
class PuiseuxBranch:
    """One local branch in tangent-aligned coordinates.

    ``series`` lists ``(u-exponent, coefficient)`` pairs for ``v`` with the
    leading term first; u-exponents are fractions with denominator dividing
    ``q``. ``p is None`` marks a line germ.
    """

    base_point: tuple
    chart: int
    tangent: tuple
    frame: tuple
    q: int
    p: int | None
    c: complex | None
    series: list
    order: int
    exact: bool = False
    homogeneous_point: tuple | None = None
    transverse_to_infinity: bool | None = None
    t_series: list = field(default_factory=list, repr=False)
    _mp_point: tuple = field(default=(), repr=False)
    _mp_tangent: tuple = field(default=(), repr=False)
    _mp_frame: tuple = field(default=(), repr=False)

    @property
    def is_line(self) -> bool:
        return self.p is None

    @property
    def r(self):
        """Projective Puiseux exponent p/q; ``math.inf`` for a line germ."""
        return math.inf if self.p is None else Fraction(self.p, self.q)

    @property
    def s(self) -> int:
        return self.q

    @property
    def s_star(self):
        return math.inf if self.p is None else self.p - self.q

    def infinity_contact(self) -> int:
        """Intersection multiplicity of the branch with the line at infinity."""
        if self.transverse_to_infinity is None:
            raise PuiseuxError("branch is not based on the line at infinity")
        if self.transverse_to_infinity:
            return self.q
        if self.p is None:
            raise PuiseuxError("the line at infinity is a component")
        return self.p

    def local_uv(self, t):
        """(u, v) at parameter t from the truncated series (mp arithmetic)."""
        t = _mp(t)
        return t**self.q, mpmath.fsum(a * t**e for e, a in self.t_series) if self.t_series else mpmath.mpf(0)

    def point_at(self, t):
        """Chart coordinates of the branch point with parameter t."""
        u, v = self.local_uv(t)
        A, d, e = self._mp_point, self._mp_tangent, self._mp_frame
        return A[0] + u * d[0] + v * e[0], A[1] + u * d[1] + v * e[1]

    def to_dict(self) -> dict:
        return {
            "base_point": [_cplx(z) for z in self.base_point],
            "homogeneous_point": [_cplx(z) for z in self.homogeneous_point] if self.homogeneous_point else None,
            "chart": self.chart,
            "tangent": [_cplx(z) for z in self.tangent],
            "q": self.q,
            "p": self.p,
            "r": None if self.p is None else str(Fraction(self.p, self.q)),
            "c": None if self.c is None else _cplx(self.c),
            "series": [[str(e), _cplx(a)] for e, a in self.series],
            "order": self.order,
            "exact": self.exact,
            "transverse_to_infinity": self.transverse_to_infinity,
        }


def _cplx(z):
    z = complex(z)
    return [z.real, z.imag]


# -- the expansion ------------------------------------------------------------


def _tangent_directions(Gs: MpPoly, m: int):
    """Roots of the lowest-degree form, as (direction, multiplicity)."""
    coeffs = [Gs.get((m - j, j), mpmath.mpf(0)) for j in range(m + 1)]
    out = []
    deg = max(j for j in range(m + 1) if coeffs[j] != 0)
    if deg < m:
        out.append(((mpmath.mpf(0), mpmath.mpf(1)), m - deg))
    if deg >= 1:
        for s, mult in mp_roots(coeffs[: deg + 1]):
            out.append(((mpmath.mpf(1), s), mult))
    return out


def _normalise_frame(d):
    d0, d1 = d
    n2 = d0 * d0 + d1 * d1
    herm = mpmath.sqrt(abs(d0) ** 2 + abs(d1) ** 2)
    if abs(n2) < mpmath.mpf(10) ** (-20) * herm**2:
        d0, d1 = d0 / herm, d1 / herm
        e = (mpmath.mpf(1), mpmath.mpf(0)) if abs(d1) >= abs(d0) else (mpmath.mpf(0), mpmath.mpf(1))
    else:
        n = mpmath.sqrt(n2)
        d0, d1 = d0 / n, d1 / n
        e = None
    tiny = mpmath.mpf(10) ** (-30)
    lead = d0 if abs(d0) > tiny else d1
    lead = mpmath.mpc(lead)
    if lead.real < -tiny or (abs(lead.real) <= tiny and lead.imag < 0):
        d0, d1 = -d0, -d1
    # snap numerically-zero parts so real tangents print as real
    d0, d1 = (_snap(d0), _snap(d1))
    if e is None:
        e = (-d1, d0)
    return (d0, d1), e


def _snap(z):
    z = mpmath.mpc(z)
    tiny = mpmath.mpf(10) ** (-int(mpmath.mp.dps * 0.6))
    re = z.real if abs(z.real) > tiny else mpmath.mpf(0)
    im = z.imag if abs(z.imag) > tiny else mpmath.mpf(0)
    return mpmath.mpc(re, im) if im else re


def _substitute(G: MpPoly, q: int, m: int, beta: int, c) -> MpPoly:
    """G(T^q, T^m (c + Y)) / T^beta."""
    out: MpPoly = {}
    binom_rows: dict[int, list] = {}
    for (i, j), a in G.items():
        shift = q * i + m * j - beta
        if j not in binom_rows:
            binom_rows[j] = [mpmath.binomial(j, k) * c ** (j - k) for k in range(j + 1)]
        for k, b in enumerate(binom_rows[j]):
            key = (shift, k)
            out[key] = out.get(key, 0) + a * b
    return out


def _series_mul(a, b, n):
    out = [mpmath.mpf(0)] * n
    for i, x in enumerate(a[:n]):
        if x == 0:
            continue
        for j in range(min(len(b), n - i)):
            out[i + j] += x * b[j]
    return out


def _series_div(a, b, n):
    out = [mpmath.mpf(0)] * n
    inv = 1 / b[0]
    for k in range(n):
        acc = a[k] if k < len(a) else 0
        for j in range(1, min(k, len(b) - 1) + 1):
            acc -= b[j] * out[k - j]
        out[k] = acc * inv
    return out


def _solve_smooth(G: MpPoly, n: int):
    """Power series Y(T) = y_1 T + ... + y_n T^n with G(T, Y(T)) = 0 and Y(0) = 0.

    Requires G(0, 0) = 0 and dG/dY(0, 0) != 0; solved by Newton iteration on
    truncated series, doubling the precision each round.
    """
    N = n + 1
    cols: dict[int, list] = {}
    for (i, j), a in G.items():
        if i < N:
            cols.setdefault(j, [mpmath.mpf(0)] * N)[i] += a
    degY = max(cols)
    col = [cols.get(j, [mpmath.mpf(0)] * N) for j in range(degY + 1)]
    dcol = [[j * x for x in col[j]] for j in range(1, degY + 1)]
    Y = [mpmath.mpf(0)] * N
    prec = 1
    while prec < N:
        prec = min(2 * prec, N)
        val = list(col[degY][:prec])
        for j in range(degY - 1, -1, -1):
            val = _series_mul(val, Y, prec)
            val = [val[k] + col[j][k] for k in range(prec)]
        der = list(dcol[-1][:prec]) if dcol else [mpmath.mpf(0)] * prec
        for j in range(len(dcol) - 2, -1, -1):
            der = _series_mul(der, Y, prec)
            der = [der[k] + dcol[j][k] for k in range(prec)]
        step = _series_div(val, der, prec)
        Y = [Y[k] - (step[k] if k < prec else 0) for k in range(N)]
    return Y


def _residual_vanishes(G: MpPoly, Y) -> bool:
    """True when the finite series Y solves G exactly (to working precision)."""
    poly = {}
    ypow = {0: mpmath.mpf(1)}
    yp = [{0: mpmath.mpf(1)}]
    for (i, j), a in G.items():
        while len(yp) <= j:
            nxt = {}
            for e1, c1 in yp[-1].items():
                for e2, c2 in enumerate(Y):
                    if c2 != 0:
                        nxt[e1 + e2] = nxt.get(e1 + e2, 0) + c1 * c2
            yp.append(nxt)
        for e, c in yp[j].items():
            poly[i + e] = poly.get(i + e, 0) + a * c
    del ypow
    tol = _zero_tol(G)
    return all(abs(c) <= tol for c in poly.values())


class _Expansion:
    def __init__(self, order: int | None, max_stages: int):
        self.order = order
        self.max_stages = max_stages
        self.found: list[tuple[int, list, bool, int]] = []

    def run(self, G, Q, Moff, terms, stage, only_steep):
        G = _clean(G)
        if not G:
            raise NonReducedError("local equation vanished identically")
        j0 = min(j for _, j in G)
        if j0 >= 2:
            raise NonReducedError("repeated factor met during the expansion")
        if j0 == 1:
            # Y = 0 solves the current equation exactly
            self.found.append((Q, terms, True, self._target(terms)))
        if stage > self.max_stages:
            raise TruncationBudgetError("stage budget exhausted before the branch became smooth")
        for edge in _hull_edges(G):
            gamma = edge.exponent_ratio
            if only_steep and gamma <= 1:
                continue
            m, q = gamma.numerator, gamma.denominator
            js = edge.start[1]
            psi = [mpmath.mpf(0)] * ((edge.end[1] - js) // q + 1)
            for (i, j), a in edge.monomials:
                psi[(j - js) // q] += a
            beta = q * edge.start[0] + m * js
            for xi, mu in mp_roots(psi):
                c = mpmath.root(xi, q) if q > 1 else xi
                G1 = _clean(_substitute(G, q, m, beta, c))
                newM = Moff * q + m
                new_terms = [(e * q, a) for e, a in terms] + [(newM, c)]
                if mu == 1:
                    self._smooth_tail(G1, Q * q, newM, new_terms)
                else:
                    self.run(G1, Q * q, newM, new_terms, stage + 1, False)

    def _smooth_tail(self, G, Q, Moff, terms):
        K = self._target(terms)
        n = max(K - Moff, 0)
        if all(j > 0 for _, j in G):
            self.found.append((Q, terms, True, K))
            return
        Y = _solve_smooth(G, n) if n else [mpmath.mpf(0)]
        tol = _zero_tol(G)
        scale = max([mpmath.mpf(1)] + [abs(y) for y in Y])
        tail = [(Moff + k, y) for k, y in enumerate(Y) if k > 0 and abs(y) > tol * scale]
        exact = _residual_vanishes(G, Y)
        self.found.append((Q, terms + tail, exact, K))

    def _target(self, terms) -> int:
        if self.order is not None:
            return self.order
        if not terms:
            return 0
        p = terms[0][0]
        return max(2 * p, p + 7)


def puiseux_branches(
    f: BivariatePolynomial,
    point: Sequence,
    max_terms: int = MAX_SINGULAR_STAGES,
    tol: float = 1e-9,
    order: int | None = None,
    chart: int = 0,
    homogeneous_point=None,
) -> list[PuiseuxBranch]:
    """All local branches of {f = 0} at ``point``.

    ``order`` fixes the highest power of the branch parameter kept in each
    series; by default the expansion runs to ``max(2p, p + 7)``. ``max_terms``
    bounds the number of singular refinement stages. ``tol`` is the
    tolerance, relative to the coefficient scale, for deciding that the point
    lies on the curve.
    """
    with mpmath.workdps(WORK_DPS):
        A = (_mp(point[0]), _mp(point[1]))
        Gs = compose_affine(f, (A[0], 1, 0), (A[1], 0, 1))
        scale = max((abs(c) for c in Gs.values()), default=mpmath.mpf(0))
        if scale == 0:
            raise PuiseuxError("zero polynomial")
        const = abs(Gs.get((0, 0), 0))
        if const > tol * scale:
            raise NotOnCurveError(f"point is not on the curve (|f| = {float(const):.3e})")
        Gs = _clean(Gs)
        Gs.pop((0, 0), None)
        m = min(i + j for i, j in Gs)
        branches: list[PuiseuxBranch] = []
        for d, _k in _tangent_directions(Gs, m):
            d, e = _normalise_frame(d)
            G0 = compose_affine(Gs, (0, d[0], e[0]), (0, d[1], e[1]))
            exp = _Expansion(order, max_terms)
            exp.run(G0, 1, 0, [], 0, True)
            for Q, terms, exact, K in exp.found:
                branches.append(_finish(A, d, e, Q, terms, exact, K, chart, homogeneous_point))
        return branches


def _finish(A, d, e, Q, terms, exact, K, chart, hom):
    if not terms:
        return PuiseuxBranch(
            base_point=tuple(complex(z) for z in A),
            chart=chart,
            tangent=tuple(complex(z) for z in d),
            frame=tuple(complex(z) for z in e),
            q=1,
            p=None,
            c=None,
            series=[],
            order=K,
            exact=True,
            homogeneous_point=hom,
            _mp_point=A,
            _mp_tangent=d,
            _mp_frame=e,
        )
    g = Q
    for ex, _ in terms:
        g = math.gcd(g, ex)
    if g != 1:  # pragma: no cover - guarded by the construction
        raise PuiseuxError("parametrisation is not reduced")
    p, c = terms[0]
    best = None
    two_pi = 2 * mpmath.pi
    for k in range(Q):
        w = mpmath.expjpi(mpmath.mpf(2 * k) / Q)
        cand = c * w**p
        a = mpmath.arg(cand) % two_pi
        if a > two_pi - mpmath.mpf(10) ** (-30):
            a = mpmath.mpf(0)
        if best is None or a < best[0] - mpmath.mpf(10) ** (-30):
            best = (a, w)
    w = best[1]
    terms = [(ex, _snap(a * w**ex)) for ex, a in terms]
    return PuiseuxBranch(
        base_point=tuple(complex(z) for z in A),
        chart=chart,
        tangent=tuple(complex(z) for z in d),
        frame=tuple(complex(z) for z in e),
        q=Q,
        p=p,
        c=complex(terms[0][1]),
        series=[(Fraction(ex, Q), complex(a)) for ex, a in terms],
        order=K,
        exact=exact,
        homogeneous_point=hom,
        t_series=terms,
        _mp_point=A,
        _mp_tangent=d,
        _mp_frame=e,
    )


# -- points at infinity ----------------------------------------------------------


def infinity_points(F: HomogeneousPolynomial):
    """Points of {F = 0} on {x0 = 0} as (chart, chart point, homogeneous point, multiplicity)."""
    coeffs = F.binary_form_at_infinity()
    if all(c == 0 for c in coeffs):
        raise PuiseuxError("the line at infinity is a component of the curve")
    d = F.degree
    top = max(k for k, c in enumerate(coeffs) if c != 0)
    out = []
    with mpmath.workdps(WORK_DPS):
        zero = mpmath.mpf(0)
        if top < d:
            out.append((2, (zero, zero), (zero, zero, mpmath.mpf(1)), d - top))
        if top >= 1:
            for t, mult in mp_roots([_mp(c) for c in coeffs[: top + 1]], vanish_tol=mpmath.mpf(10) ** -40):
                t = _snap(t)
                if abs(t) <= 1:
                    out.append((1, (zero, t), (zero, mpmath.mpf(1), t), mult))
                else:
                    out.append((2, (zero, _snap(1 / t)), (zero, _snap(1 / t), mpmath.mpf(1)), mult))
    return out


def branches_at_infinity(F: HomogeneousPolynomial, tol: float = 1e-9, order: int | None = None) -> list[PuiseuxBranch]:
    """Branches of the projective curve at its points on the line x0 = 0.

    In charts 1 and 2 the local coordinates are ``(x0/xk, .)`` so the line at
    infinity is ``z = 0``; a branch is transverse to it when its tangent has a
    nonzero ``z`` component.
    """
    out = []
    for chart, pt, hom, _mult in infinity_points(F):
        f = F.dehomogenize(chart)
        hom_c = tuple(complex(z) for z in hom)
        for b in puiseux_branches(f, pt, tol=tol, order=order, chart=chart, homogeneous_point=hom_c):
            b.transverse_to_infinity = abs(b.tangent[0]) > 1e-12
            out.append(b)
    return out


def classify_subquadratic(b: PuiseuxBranch) -> tuple[bool, bool]:
    """(quadratic, subquadratic) for a nonlinear branch."""
    if b.p is None:
        raise PuiseuxError("a line germ has infinite exponent")
    return b.p == 2 * b.q, b.p <= 2 * b.q


def classify_exponents(q: int, p: int) -> tuple[bool, bool]:
    return p == 2 * q, p <= 2 * q
