"""The outer billiard map about a strictly convex closed curve.

From an exterior point A there are two tangent lines to the curve. The map
sends A to 2P - A, where P is the point of contact of the right tangent ray.
With a counterclockwise parametrization the right contact is the parameter
where ``cross(position(s) - A, position'(s))`` changes sign from negative to
positive as s increases; the other contact gives the inverse map.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

TWO_PI = 2 * math.pi
DEFAULT_SAMPLES = 720
DEFAULT_TOL = 1e-12


class BilliardError(ValueError):
    pass


class InsideCurveError(BilliardError):
    pass


class OnCurveError(BilliardError):
    pass


class TangencyError(BilliardError):
    pass


class ForbiddenRegionError(BilliardError):
    def __init__(self, message: str, record: "OrbitRecord"):
        self.record = record
        super().__init__(message)


class StraddleError(BilliardError):
    pass


def cross(a, b) -> float:
    return a[0] * b[1] - a[1] * b[0]


@dataclass(frozen=True)
class ParametricConvexCurve:
    """A closed curve s -> position(s), s in [0, 2 pi), traversed counterclockwise."""

    position: Callable[[float], np.ndarray]
    first: Callable[[float], np.ndarray]
    second: Callable[[float], np.ndarray]
    descriptor: dict = field(default_factory=dict)
    samples: int = DEFAULT_SAMPLES

    def __post_init__(self):
        ss = np.linspace(0, TWO_PI, self.samples, endpoint=False)
        curv = np.array([cross(self.first(s), self.second(s)) for s in ss])
        if not (np.all(curv > 0) or np.all(curv < 0)):
            raise BilliardError("curve is not strictly convex on the sample grid")
        if np.all(curv < 0):
            raise BilliardError("curve must be parametrized counterclockwise")
        object.__setattr__(self, "_grid", ss)
        object.__setattr__(self, "_pts", np.array([self.position(s) for s in ss]))
        object.__setattr__(self, "_tangents", np.array([self.first(s) for s in ss]))

    @classmethod
    def ellipse(cls, a: float, b: float, center=(0.0, 0.0), samples: int = DEFAULT_SAMPLES):
        if a <= 0 or b <= 0:
            raise BilliardError("semi-axes must be positive")
        cx, cy = center
        return cls(
            position=lambda s: np.array([cx + a * np.cos(s), cy + b * np.sin(s)]),
            first=lambda s: np.array([-a * np.sin(s), b * np.cos(s)]),
            second=lambda s: np.array([-a * np.cos(s), -b * np.sin(s)]),
            descriptor={"kind": "ellipse", "a": a, "b": b, "center": [cx, cy]},
            samples=samples,
        )

    @classmethod
    def circle(cls, radius: float = 1.0, center=(0.0, 0.0)):
        return cls.ellipse(radius, radius, center)

    @classmethod
    def perturbed_circle(cls, eps: float, k: int = 3):
        """Radius 1 + eps cos(k s) about the origin; convex for small eps."""

        def rho(s, n=0):
            if n == 0:
                return 1 + eps * math.cos(k * s)
            if n == 1:
                return -eps * k * math.sin(k * s)
            return -eps * k * k * math.cos(k * s)

        def pos(s):
            return np.array([rho(s) * math.cos(s), rho(s) * math.sin(s)])

        def d1(s):
            r, r1 = rho(s), rho(s, 1)
            return np.array([r1 * math.cos(s) - r * math.sin(s), r1 * math.sin(s) + r * math.cos(s)])

        def d2(s):
            r, r1, r2 = rho(s), rho(s, 1), rho(s, 2)
            return np.array(
                [
                    r2 * math.cos(s) - 2 * r1 * math.sin(s) - r * math.cos(s),
                    r2 * math.sin(s) + 2 * r1 * math.cos(s) - r * math.sin(s),
                ]
            )

        return cls(pos, d1, d2, {"kind": "perturbed_circle", "eps": eps, "k": k})

    @property
    def center(self) -> np.ndarray:
        return self._pts.mean(axis=0)

    @property
    def diameter(self) -> float:
        c = self.center
        return 2 * float(np.max(np.linalg.norm(self._pts - c, axis=1)))

    def winding_number(self, A) -> int:
        d = self._pts - np.asarray(A, dtype=float)
        ang = np.arctan2(d[:, 1], d[:, 0])
        inc = np.diff(np.append(ang, ang[0]))
        inc = (inc + math.pi) % TWO_PI - math.pi
        return int(round(inc.sum() / TWO_PI))

    def distance(self, A) -> float:
        A = np.asarray(A, dtype=float)
        i = int(np.argmin(np.linalg.norm(self._pts - A, axis=1)))
        s = float(self._grid[i])
        # Newton on (position - A) . position' = 0 for the foot of the perpendicular
        for _ in range(30):
            p, d1, d2 = self.position(s), self.first(s), self.second(s)
            g = float(np.dot(p - A, d1))
            dg = float(np.dot(d1, d1) + np.dot(p - A, d2))
            if dg == 0:
                break
            step = g / dg
            s -= step
            if abs(step) < 1e-15:
                break
        return float(np.linalg.norm(self.position(s) - A))

    def classify(self, A, tol: float = 1e-9) -> str:
        """'outside', 'inside' or 'on'."""
        if self.distance(A) <= tol * max(1.0, self.diameter):
            return "on"
        return "inside" if self.winding_number(A) != 0 else "outside"

    def require_outside(self, A, tol: float = 1e-9):
        where = self.classify(A, tol)
        if where == "on":
            raise OnCurveError(f"point {tuple(A)} lies on the curve")
        if where == "inside":
            raise InsideCurveError(f"point {tuple(A)} lies inside the curve")

    def to_dict(self) -> dict:
        return dict(self.descriptor)


def _tangency_function(curve, A):
    def phi(s):
        return cross(curve.position(s) - A, curve.first(s))

    def dphi(s):
        # d/ds cross(P - A, P') = cross(P', P') + cross(P - A, P'')
        return cross(curve.position(s) - A, curve.second(s))

    return phi, dphi


def _refine(phi, dphi, lo, hi, tol):
    """Safeguarded Newton inside a sign-change bracket; returns s to ~machine precision."""
    flo = phi(lo)
    s = 0.5 * (lo + hi)
    for _ in range(200):
        f = phi(s)
        if f == 0:
            return s
        if (f < 0) == (flo < 0):
            lo, flo = s, f
        else:
            hi = s
        d = dphi(s)
        nxt = s - f / d if d != 0 else 0.5 * (lo + hi)
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - s) <= tol * 1e-3 or hi - lo <= tol * 1e-3:
            return nxt
        s = nxt
    if hi - lo > tol:
        raise TangencyError(f"tangency refinement did not converge (bracket {hi - lo:.2e})")
    return s


def tangencies(curve: ParametricConvexCurve, A, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """(right, left) tangency parameters from an exterior point, each in [0, 2 pi)."""
    A = np.asarray(A, dtype=float)
    curve.require_outside(A)
    phi, dphi = _tangency_function(curve, A)
    grid = curve._grid
    rel = curve._pts - A
    vals = rel[:, 0] * curve._tangents[:, 1] - rel[:, 1] * curve._tangents[:, 0]
    right, left = [], []
    n = len(grid)
    nxt = np.roll(vals, -1)
    prev = np.roll(vals, 1)
    h = TWO_PI / n
    for k in np.nonzero((vals < 0) & (nxt > 0))[0]:
        right.append(_refine(phi, dphi, grid[k], grid[k] + h, tol))
    for k in np.nonzero((vals > 0) & (nxt < 0))[0]:
        left.append(_refine(phi, dphi, grid[k], grid[k] + h, tol))
    # a sample landing exactly on a contact
    for k in np.nonzero(vals == 0)[0]:
        if prev[k] < 0 < nxt[k]:
            right.append(grid[k])
        elif prev[k] > 0 > nxt[k]:
            left.append(grid[k])
    if len(right) != 1 or len(left) != 1:
        raise TangencyError(f"expected one tangency of each kind, found {len(right)} and {len(left)}")
    r, l = right[0] % TWO_PI, left[0] % TWO_PI
    for s in (r, l):
        res = abs(phi(s)) / max(1.0, float(np.linalg.norm(curve.first(s))) * float(np.linalg.norm(curve.position(s) - A)))
        if res > max(tol, 1e-13) * 1e3:
            raise TangencyError(f"tangency residual {res:.2e} above tolerance")
    return r, l


def right_tangency(curve: ParametricConvexCurve, A, tol: float = DEFAULT_TOL) -> float:
    return tangencies(curve, A, tol)[0]


def left_tangency(curve: ParametricConvexCurve, A, tol: float = DEFAULT_TOL) -> float:
    return tangencies(curve, A, tol)[1]


def step(curve: ParametricConvexCurve, A, tol: float = DEFAULT_TOL) -> np.ndarray:
    """T(A) = 2 P - A with P the right contact point."""
    s = right_tangency(curve, A, tol)
    return 2 * curve.position(s) - np.asarray(A, dtype=float)


def left_step(curve: ParametricConvexCurve, A, tol: float = DEFAULT_TOL) -> np.ndarray:
    """The inverse map: reflection through the left contact point."""
    s = left_tangency(curve, A, tol)
    return 2 * curve.position(s) - np.asarray(A, dtype=float)


@dataclass
class OrbitRecord:
    points: list
    tangency: list  # parameter of the step producing each point; nan for the start
    residuals: list

    def __len__(self):
        return len(self.points)

    def rows(self):
        for k, (p, s, r) in enumerate(zip(self.points, self.tangency, self.residuals)):
            yield k, float(p[0]), float(p[1]), s, r

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "x", "y", "s", "residual"])
        for k, x, y, s, r in self.rows():
            w.writerow([k, repr(x), repr(y), "" if math.isnan(s) else repr(s), repr(r)])
        return buf.getvalue()

    def summary(self) -> dict:
        res = [r for r in self.residuals]
        return {"n": len(self.points) - 1, "max_residual": max(res), "mean_residual": float(np.mean(res))}


def orbit(curve: ParametricConvexCurve, A, n: int, tol: float = DEFAULT_TOL, integral=None) -> OrbitRecord:
    """n successive images of A; residuals are |f(x_k) - f(A)| for the optional integral f."""
    if n < 0:
        raise BilliardError("n must be nonnegative")
    A = np.asarray(A, dtype=float)
    curve.require_outside(A)
    f0 = _eval(integral, A) if integral is not None else 0.0
    rec = OrbitRecord([A.copy()], [math.nan], [0.0])
    x = A
    for _ in range(n):
        try:
            s = right_tangency(curve, x, tol)
        except (InsideCurveError, OnCurveError, TangencyError) as exc:
            raise ForbiddenRegionError(f"iterate {len(rec) - 1} left the exterior: {exc}", rec) from exc
        x = 2 * curve.position(s) - x
        rec.points.append(x)
        rec.tangency.append(s)
        rec.residuals.append(abs(_eval(integral, x) - f0) if integral is not None else 0.0)
    return rec


def _eval(f, A) -> float:
    return float(f(float(A[0]), float(A[1])))


def invariance_residual(curve: ParametricConvexCurve, f, A, tol: float = DEFAULT_TOL) -> float:
    """|f(T(A)) - f(A)| for a polynomial (or any callable of x, y)."""
    return abs(_eval(f, step(curve, A, tol)) - _eval(f, A))


def finite_difference_jacobian(fn: Callable[[np.ndarray], np.ndarray], A, h: float) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    J = np.empty((2, 2))
    for k in range(2):
        e = np.zeros(2)
        e[k] = h
        J[:, k] = (np.asarray(fn(A + e)) - np.asarray(fn(A - e))) / (2 * h)
    return J


def jacobian_determinant(curve: ParametricConvexCurve, A, h: float = 1e-5, tol: float = DEFAULT_TOL) -> float:
    """Central-difference Jacobian determinant of T at A; 1 for an area-preserving map.

    Raises :class:`StraddleError` if a stencil point is not exterior or its
    contact parameter jumps away from the one at A.
    """
    A = np.asarray(A, dtype=float)
    s0 = right_tangency(curve, A, tol)
    for dx, dy in ((h, 0), (-h, 0), (0, h), (0, -h)):
        B = A + np.array([dx, dy])
        try:
            s = right_tangency(curve, B, tol)
        except BilliardError as exc:
            raise StraddleError(f"stencil point {tuple(B)} is not exterior") from exc
        jump = abs((s - s0 + math.pi) % TWO_PI - math.pi)
        if jump > 1e3 * h / max(curve.distance(A), 1e-12) + 1e-6:
            raise StraddleError(f"contact parameter jumps by {jump:.2e} across the stencil")
    return float(np.linalg.det(finite_difference_jacobian(lambda X: step(curve, X, tol), A, h)))


def random_outside_points(curve: ParametricConvexCurve, n: int, rng: np.random.Generator, scale=(1.1, 4.0)) -> np.ndarray:
    """Points c + lam (position(s) - c) with lam in ``scale``; exterior since the curve is convex about c."""
    c = curve.center
    out = np.empty((n, 2))
    for k in range(n):
        s = rng.uniform(0, TWO_PI)
        lam = rng.uniform(*scale)
        out[k] = c + lam * (curve.position(s) - c)
    return out


def sweep(curve: ParametricConvexCurve, f, points: Sequence, tol: float = DEFAULT_TOL) -> list[float]:
    return [invariance_residual(curve, f, A, tol) for A in points]
