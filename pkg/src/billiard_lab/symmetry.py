"""Relative symmetry of tangent-line sections and the leafwise integral checks.

A curve component {psi = 0} of a level set of an integral sits inside a curve
Gamma. At a smooth point t the tangent line meets Gamma in a multiset of line
parameters, and the relative symmetry property asks that this multiset be
centrally symmetric about t. The integral itself is written f = g psi^m, with
F = g^(1/m) psi on a chosen leaf; along {psi = 0} the skew Hessian H(F) should
be constant, and U(eps) = F(P + eps (F_y, -F_x)) even in eps.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .polycore import BivariatePolynomial, RootMultiset, roots, skew_hessian
from .polycore.poly import taylor_coefficients

DEFAULT_SYMMETRY_TOL = 1e-7


class SymmetryError(ValueError):
    pass


class BranchingLocusError(SymmetryError):
    """g vanishes at the point, so the leaf F = g^(1/m) psi is not smooth there."""


# -- restriction to lines ---------------------------------------------------------------


def restrict_to_line(p: BivariatePolynomial, point, direction) -> list:
    """Ascending coefficients of u -> p(point + u direction)."""
    tc = taylor_coefficients(p, tuple(point))
    deg = max((i + j for i, j in tc), default=0)
    out = [0] * (deg + 1)
    for (i, j), c in tc.items():
        out[i + j] = out[i + j] + c * direction[0] ** i * direction[1] ** j
    return out


def _gradient(p: BivariatePolynomial, point):
    return p.diff(0)(*point), p.diff(1)(*point)


def _is_exact(z) -> bool:
    return isinstance(z, (int, Fraction))


def unit_tangent(psi: BivariatePolynomial, t, tol: float = 1e-9):
    """(-psi_y, psi_x) normalised; stays exact when it already has length 1."""
    px, py = _gradient(psi, t)
    v = (-py, px)
    if all(_is_exact(c) for c in v):
        n2 = v[0] * v[0] + v[1] * v[1]
        if n2 == 1:
            return v
        root = math.isqrt(n2.numerator) if isinstance(n2, Fraction) else math.isqrt(n2)
        if isinstance(n2, int) and root * root == n2:
            return (Fraction(v[0], root), Fraction(v[1], root))
    v = (complex(v[0]), complex(v[1]))
    norm = math.sqrt(abs(v[0]) ** 2 + abs(v[1]) ** 2)
    if norm <= tol:
        raise SymmetryError("the point is singular on the curve (zero gradient)")
    v = (v[0] / norm, v[1] / norm)
    if abs(v[0].imag) == 0 and abs(v[1].imag) == 0:
        return (v[0].real, v[1].real)
    return v


def _check_on_curve(psi: BivariatePolynomial, t, tol: float):
    val = psi(*t)
    if _is_exact(val) and all(_is_exact(c) for c in t):
        if val != 0:
            raise SymmetryError(f"point is not on the curve (value {val})")
        return
    scale = sum(abs(float(c)) * abs(complex(t[0])) ** i * abs(complex(t[1])) ** j for (i, j), c in psi.terms.items())
    if abs(complex(val)) > tol * max(scale, 1.0):
        raise SymmetryError(f"point is not on the curve (|psi| = {abs(complex(val)):.2e})")


def tangent_line_intersections(
    psi: BivariatePolynomial, gamma: BivariatePolynomial, t, tol: float = 1e-9, cluster_radius: float = 1e-6
) -> RootMultiset:
    """Roots u, with multiplicity, of gamma(t + u v) for the unit tangent v of {psi = 0} at t."""
    _check_on_curve(psi, t, tol)
    v = unit_tangent(psi, t, tol)
    coeffs = restrict_to_line(gamma, t, v)
    if not any(coeffs):
        raise SymmetryError("the tangent line is a component of gamma")
    if not all(_is_exact(c) for c in coeffs):
        scale = max(abs(complex(c)) for c in coeffs)
        # float evaluation leaves noise where the exact coefficient is zero
        coeffs = [c if abs(complex(c)) > 1e-12 * scale else 0 for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) < 2:
        return RootMultiset((), cluster_radius, 0.0)
    return roots(coeffs, cluster_radius=cluster_radius)


# -- central symmetry ------------------------------------------------------------------


@dataclass
class SymmetryReport:
    base_point: tuple
    roots: list  # values repeated by multiplicity
    center: complex
    pairs: list
    defect: float
    unmatched: int
    tolerance: float
    self_paired: int = 0

    @property
    def accounted(self) -> int:
        return 2 * len(self.pairs) - self.self_paired + self.unmatched

    @property
    def symmetric(self) -> bool:
        return self.unmatched == 0 and self.defect <= self.tolerance

    def to_dict(self) -> dict:
        c = lambda z: [complex(z).real, complex(z).imag]
        return {
            "base_point": [c(z) for z in self.base_point],
            "roots": [c(z) for z in self.roots],
            "center": c(self.center),
            "pairs": [[c(a), c(b)] for a, b in self.pairs],
            "defect": self.defect,
            "unmatched": self.unmatched,
            "tolerance": self.tolerance,
            "symmetric": self.symmetric,
        }


def check_central_symmetry(ms, center=0.0, tol: float = DEFAULT_SYMMETRY_TOL, base_point=()) -> SymmetryReport:
    """Greedy pairing of each u with the nearest unused partner to 2 center - u.

    ``tol`` is scaled by max(1, diameter of the multiset).
    """
    vals = ms.values() if isinstance(ms, RootMultiset) else [complex(z) for z in ms]
    vals = sorted((complex(z) for z in vals), key=lambda z: (z.real, z.imag))
    center = complex(center)
    diam = max((abs(a - b) for a in vals for b in vals), default=0.0)
    eff = tol * max(1.0, diam)
    used = [False] * len(vals)
    pairs, defect, unmatched, lone = [], 0.0, 0, 0
    for i, u in enumerate(vals):
        if used[i]:
            continue
        used[i] = True
        target = 2 * center - u
        best, bestd = None, math.inf
        for j, w in enumerate(vals):
            if not used[j] and abs(w - target) < bestd:
                best, bestd = j, abs(w - target)
        if best is not None and bestd <= eff:
            used[best] = True
            pairs.append((u, vals[best]))
            defect = max(defect, abs((u + vals[best]) / 2 - center))
        elif abs(u - center) <= eff:
            pairs.append((u, u))
            lone += 1
            defect = max(defect, abs(u - center))
        else:
            unmatched += 1
    return SymmetryReport(tuple(base_point), vals, center, pairs, defect, unmatched, eff, lone)


def symmetry_at(psi, gamma, t, tol: float = DEFAULT_SYMMETRY_TOL, cluster_radius: float = 1e-6) -> SymmetryReport:
    ms = tangent_line_intersections(psi, gamma, t, cluster_radius=cluster_radius)
    return check_central_symmetry(ms, 0.0, tol, base_point=t)


# -- leaves of a multivalued integral -------------------------------------------------------


@dataclass
class LeafContext:
    psi: BivariatePolynomial
    g: BivariatePolynomial
    m: int = 1
    leaf: int = 0  # which m-th root of g at the base sample
    integral: BivariatePolynomial | None = None

    def __post_init__(self):
        if self.m < 1:
            raise SymmetryError("m must be a positive integer")
        if self.g.is_zero():
            raise SymmetryError("g vanishes identically")
        if self.integral is not None and self.g * self.psi**self.m != self.integral:
            raise SymmetryError("g * psi^m does not reconstruct the integral")

    @property
    def f(self) -> BivariatePolynomial:
        return self.g * self.psi**self.m

    def root_of_g(self, value: complex, previous: complex | None = None) -> complex:
        """The chosen m-th root of g: principal times the leaf's root of unity, or the one nearest ``previous``."""
        cands = [cmath.exp(cmath.log(value) / self.m) * cmath.exp(2j * math.pi * k / self.m) for k in range(self.m)]
        if previous is None:
            return cands[self.leaf % self.m]
        return min(cands, key=lambda z: abs(z - previous))


def _series_power(a: list, alpha, n: int, a0_power):
    """First n coefficients of A(eps)^alpha with A(0) != 0 (Miller's recurrence)."""
    out = [a0_power] + [0] * (n - 1)
    a0 = a[0]
    for k in range(1, n):
        acc = 0
        for j in range(1, min(k, len(a) - 1) + 1):
            acc += (alpha * j - (k - j)) * a[j] * out[k - j]
        out[k] = acc / (k * a0)
    return out


def _series_mul(a, b, n):
    out = [0] * n
    for i, x in enumerate(a[:n]):
        for j in range(min(len(b), n - i)):
            out[i + j] += x * b[j]
    return out


def leaf_derivatives(ctx: LeafContext, P, root=None):
    """Partial derivatives of F = g^(1/m) psi at P up to order 2, and the value of g^(1/m) used."""
    g, psi, m = ctx.g, ctx.psi, ctx.m
    gv = complex(g(*P))
    if abs(gv) == 0:
        raise BranchingLocusError("g(P) = 0")
    phi = root if root is not None else ctx.root_of_g(gv)
    gx, gy = complex(g.diff(0)(*P)), complex(g.diff(1)(*P))
    gxx, gxy, gyy = (complex(g.diff(0).diff(0)(*P)), complex(g.diff(0).diff(1)(*P)), complex(g.diff(1).diff(1)(*P)))
    a = 1 / m
    # phi = g^a: derivatives by the chain rule, using phi / g = g^(a - 1)
    p1 = a * phi / gv
    p2 = a * (a - 1) * phi / gv**2
    px, py = p1 * gx, p1 * gy
    pxx, pxy, pyy = p2 * gx * gx + p1 * gxx, p2 * gx * gy + p1 * gxy, p2 * gy * gy + p1 * gyy
    s = complex(psi(*P))
    sx, sy = complex(psi.diff(0)(*P)), complex(psi.diff(1)(*P))
    sxx, sxy, syy = (complex(psi.diff(0).diff(0)(*P)), complex(psi.diff(0).diff(1)(*P)), complex(psi.diff(1).diff(1)(*P)))
    Fx = px * s + phi * sx
    Fy = py * s + phi * sy
    Fxx = pxx * s + 2 * px * sx + phi * sxx
    Fxy = pxy * s + px * sy + py * sx + phi * sxy
    Fyy = pyy * s + 2 * py * sy + phi * syy
    return {"phi": phi, "Fx": Fx, "Fy": Fy, "Fxx": Fxx, "Fxy": Fxy, "Fyy": Fyy}


def skew_hessian_of_leaf(ctx: LeafContext, P, root=None) -> complex:
    d = leaf_derivatives(ctx, P, root)
    return d["Fxx"] * d["Fy"] ** 2 - 2 * d["Fxy"] * d["Fx"] * d["Fy"] + d["Fyy"] * d["Fx"] ** 2


def u_series(ctx: LeafContext, P, order: int, root=None) -> list:
    """Taylor coefficients of U(eps) = F(P + eps (F_y(P), -F_x(P))) through eps^order.

    Exact for m = 1 with rational P; otherwise complex floating point on the
    chosen leaf.
    """
    n = order + 1
    if ctx.m == 1:
        F = ctx.f
        Fx, Fy = _gradient(F, P)
        coeffs = restrict_to_line(F, P, (Fy, -Fx))
        return (coeffs + [0] * n)[:n]
    d = leaf_derivatives(ctx, P, root)
    w = (d["Fy"], -d["Fx"])
    Pc = tuple(complex(z) for z in P)
    G = [complex(c) for c in restrict_to_line(ctx.g, Pc, w)]
    S = [complex(c) for c in restrict_to_line(ctx.psi, Pc, w)]
    A = _series_power(G + [0] * n, Fraction(1, ctx.m), n, d["phi"])
    return _series_mul(A, S + [0] * n, n)


def epsilon_even_test(ctx: LeafContext, P, order: int = 5, tol: float = 1e-10) -> list[float]:
    """Magnitudes of the odd Taylor coefficients of U through eps^order."""
    if abs(complex(ctx.g(*P))) == 0:
        raise BranchingLocusError("g(P) = 0: P is on the branching locus")
    Fx, Fy = _gradient(ctx.psi, P)
    if complex(Fx) == 0 and complex(Fy) == 0:
        raise SymmetryError("P is a singular point of the curve")
    c = u_series(ctx, P, order)
    return [abs(complex(c[k])) for k in range(1, order + 1, 2)]


@dataclass
class ConstancyReport:
    values: list
    mean: complex
    max_deviation: float
    identity_gap: float  # max |g^(3/m) H(psi) - H(F)| between the two routes

    def to_dict(self):
        return {
            "mean": [self.mean.real, self.mean.imag],
            "max_deviation": self.max_deviation,
            "identity_gap": self.identity_gap,
            "n": len(self.values),
        }


def hF_constancy(ctx: LeafContext, samples: Sequence, tol: float = 1e-9) -> ConstancyReport:
    """H(F) along samples of {psi = 0}, by g^(3/m) H(psi) and directly on the leaf.

    The leaf is fixed at the first sample and continued to the nearest root
    along the sample order.
    """
    if not samples:
        raise SymmetryError("no sample points")
    Hpsi = skew_hessian(ctx.psi)
    Hf = skew_hessian(ctx.f) if ctx.m == 1 else None
    values, gap, prev = [], 0.0, None
    for P in samples:
        gv = complex(ctx.g(*P))
        if gv == 0:
            raise BranchingLocusError(f"g vanishes at sample {P}")
        phi = ctx.root_of_g(gv, prev)
        prev = phi
        val = phi**3 * complex(Hpsi(*P))
        direct = complex(Hf(*P)) if Hf is not None else skew_hessian_of_leaf(ctx, P, phi)
        gap = max(gap, abs(val - direct))
        values.append(val)
    mean = sum(values) / len(values)
    dev = max(abs(v - mean) for v in values)
    return ConstancyReport(values, mean, dev, gap)


@dataclass
class Epsilon3Report:
    eps3: complex
    dHdV: complex
    ratio: complex | None
    status: str

    def to_dict(self):
        c = lambda z: None if z is None else [complex(z).real, complex(z).imag]
        return {"eps3": c(self.eps3), "dHdV": c(self.dHdV), "ratio": c(self.ratio), "status": self.status}


def epsilon3_vs_dHdV(ctx: LeafContext, P, tol: float = 1e-12, h: float = 1e-4) -> Epsilon3Report:
    """The eps^3 coefficient of U and the derivative of H(F) along V = F_y d/dx - F_x d/dy.

    For m = 1 both are exact polynomial evaluations; for m > 1 the derivative
    is a central difference of H(F) on the leaf with step ``h``.
    """
    e3 = complex(u_series(ctx, P, 3)[3])
    if ctx.m == 1:
        F = ctx.f
        H = skew_hessian(F)
        Fx, Fy = _gradient(F, P)
        Hx, Hy = _gradient(H, P)
        dh = complex(Hx * Fy - Hy * Fx)
    else:
        d = leaf_derivatives(ctx, P)
        V = (d["Fy"], -d["Fx"])
        Pc = tuple(complex(z) for z in P)
        fwd = (Pc[0] + h * V[0], Pc[1] + h * V[1])
        bwd = (Pc[0] - h * V[0], Pc[1] - h * V[1])
        phi = d["phi"]
        hf = skew_hessian_of_leaf(ctx, fwd, ctx.root_of_g(complex(ctx.g(*fwd)), phi))
        hb = skew_hessian_of_leaf(ctx, bwd, ctx.root_of_g(complex(ctx.g(*bwd)), phi))
        dh = (hf - hb) / (2 * h)
    small3, smallh = abs(e3) <= tol, abs(dh) <= tol
    if small3 and smallh:
        return Epsilon3Report(e3, dh, None, "both vanish")
    if small3 or smallh:
        return Epsilon3Report(e3, dh, None, "one vanishes")
    return Epsilon3Report(e3, dh, e3 / dh, "ok")


# -- sampling points on curves --------------------------------------------------------------


def project_to_curve(psi: BivariatePolynomial, start, steps: int = 60, tol: float = 1e-14):
    """Newton projection along the gradient (works for complex points too)."""
    x, y = complex(start[0]), complex(start[1])
    px, py = psi.diff(0), psi.diff(1)
    for _ in range(steps):
        v = complex(psi(x, y))
        gx, gy = complex(px(x, y)), complex(py(x, y))
        n2 = gx * gx.conjugate() + gy * gy.conjugate()
        if n2 == 0:
            raise SymmetryError("projection hit a singular point")
        # minimal-norm correction solving the linearised equation
        k = v / n2
        dx, dy = k * gx.conjugate(), k * gy.conjugate()
        x, y = x - dx, y - dy
        if abs(dx) + abs(dy) <= tol * max(1.0, abs(x) + abs(y)):
            break
    if abs(complex(psi(x, y))) > 1e-9 * max(1.0, abs(x) + abs(y)) ** max(psi.degree, 1):
        raise SymmetryError("projection onto the curve did not converge")
    return x, y


def _realify(z):
    return z.real if abs(z.imag) <= 1e-14 * max(1.0, abs(z)) else z


def trace_real_curve(psi: BivariatePolynomial, start, n: int, h: float = 0.05) -> list:
    """n points along the real component through ``start``, stepping along the unit tangent."""
    x, y = project_to_curve(psi, start)
    pts = [(x.real, y.real)]
    for _ in range(n - 1):
        gx, gy = psi.diff(0)(pts[-1][0], pts[-1][1]), psi.diff(1)(pts[-1][0], pts[-1][1])
        norm = math.hypot(gx, gy)
        if norm == 0:
            raise SymmetryError("tracing met a singular point")
        guess = (pts[-1][0] - h * gy / norm, pts[-1][1] + h * gx / norm)
        x, y = project_to_curve(psi, guess)
        pts.append((x.real, y.real))
    return pts


def complex_points_near(psi: BivariatePolynomial, real_point, count: int, radius: float, rng: np.random.Generator) -> list:
    """Points of {psi = 0} in C^2 reached from a real point by complex tangent increments."""
    x0, y0 = complex(real_point[0]), complex(real_point[1])
    gx, gy = complex(psi.diff(0)(x0, y0)), complex(psi.diff(1)(x0, y0))
    norm = math.sqrt(abs(gx) ** 2 + abs(gy) ** 2)
    tx, ty = -gy / norm, gx / norm
    out = []
    for _ in range(count):
        d = radius * rng.uniform(0.2, 1.0) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
        x, y = project_to_curve(psi, (x0 + d * tx, y0 + d * ty))
        out.append((x, y))
    return out


def circle_points(n: int, radius: float = 1.0):
    return [(radius * math.cos(2 * math.pi * k / n), radius * math.sin(2 * math.pi * k / n)) for k in range(n)]
