"""Complex roots of univariate polynomials with multiplicity clustering."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

DEFAULT_TOL = 1e-12
DEFAULT_CLUSTER_RADIUS = 1e-6


class RootFindingError(RuntimeError):
    def __init__(self, message: str, best_residual: float):
        self.best_residual = best_residual
        super().__init__(f"{message} (best residual {best_residual:.3e})")


def _to_complex(c) -> complex:
    if isinstance(c, Fraction):
        return complex(c.numerator / c.denominator)
    return complex(c)


class UnivariateComplexPolynomial:
    """Coefficients in ascending degree; trailing zeros are trimmed on construction."""

    __slots__ = ("coefficients", "_exact")

    def __init__(self, coefficients: Sequence):
        coeffs = list(coefficients)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            raise ValueError("zero polynomial")
        self._exact = coeffs
        self.coefficients = [_to_complex(c) for c in coeffs]

    @classmethod
    def from_roots(cls, roots: Sequence[complex], leading: complex = 1.0):
        c = np.poly(np.asarray(roots, dtype=complex))[::-1] * leading
        return cls(list(c))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def __call__(self, z):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * z + c
        return acc

    def mp_coefficients(self):
        out = []
        for c in self._exact:
            if isinstance(c, Fraction):
                out.append(mpmath.mpf(c.numerator) / c.denominator)
            elif isinstance(c, (mpmath.mpf, mpmath.mpc)):
                out.append(c)
            else:
                out.append(mpmath.mpc(complex(c)))
        return out

    def derivative(self) -> "UnivariateComplexPolynomial":
        if self.degree == 0:
            raise ValueError("derivative of a constant")
        return UnivariateComplexPolynomial([k * c for k, c in enumerate(self._exact)][1:])

    def __repr__(self):
        return f"UnivariateComplexPolynomial({self.coefficients!r})"


@dataclass(frozen=True)
class RootMultiset:
    roots: tuple[tuple[complex, int], ...]
    radius: float = DEFAULT_CLUSTER_RADIUS
    residual: float = 0.0

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.roots)

    def values(self) -> list[complex]:
        """Roots repeated by multiplicity."""
        out = []
        for z, m in self.roots:
            out.extend([z] * m)
        return out

    def __iter__(self):
        return iter(self.roots)

    def __len__(self):
        return len(self.roots)


def _scaled_residual(coeffs_mp, z) -> float:
    val = mpmath.polyval(list(reversed(coeffs_mp)), z)
    scale = sum(abs(c) * abs(z) ** k for k, c in enumerate(coeffs_mp))
    return float(abs(val) / scale) if scale else float(abs(val))


def _mp_newton(coeffs_mp, z0, order: int, steps: int = 80):
    """Newton on the (order-1)th derivative, which has a simple root at an order-fold cluster."""
    c = list(coeffs_mp)
    for _ in range(order - 1):
        c = [k * a for k, a in enumerate(c)][1:]
    dc = [k * a for k, a in enumerate(c)][1:]
    rc, rdc = list(reversed(c)), list(reversed(dc))
    z = mpmath.mpc(z0)
    for _ in range(steps):
        d = mpmath.polyval(rdc, z)
        if d == 0:
            break
        dz = mpmath.polyval(rc, z) / d
        z -= dz
        if abs(dz) <= mpmath.mpf(10) ** (-mpmath.mp.dps + 5) * max(1, abs(z)):
            break
    return z


def _cluster(values: list[complex], radius: float):
    """Single-linkage clustering; returns lists of indices."""
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= radius * max(1.0, abs(values[i])):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def roots(
    p: UnivariateComplexPolynomial | Sequence,
    tol: float = DEFAULT_TOL,
    cluster_radius: float = DEFAULT_CLUSTER_RADIUS,
) -> RootMultiset:
    """All complex roots of ``p`` with multiplicities.

    Seeds come from the companion matrix. Tight groups of seeds are treated as
    one multiple root and refined in extended precision on the matching
    derivative; isolated seeds are polished by Newton. Roots closer than
    ``cluster_radius`` (relative to max(1, |z|)) are merged in the output.
    """
    if not isinstance(p, UnivariateComplexPolynomial):
        p = UnivariateComplexPolynomial(p)
    if p.degree < 1:
        raise ValueError("roots need degree >= 1")
    # zero roots are exact: strip them first
    low = 0
    while p._exact[low] == 0:
        low += 1
    core = UnivariateComplexPolynomial(p._exact[low:])
    found: list[tuple[complex, int]] = []
    if low:
        found.append((0j, low))
    if core.degree >= 1:
        found.extend(_core_roots(core, tol, cluster_radius))
    with mpmath.workdps(40):
        coeffs_mp = p.mp_coefficients()
        worst = max((_scaled_residual(coeffs_mp, mpmath.mpc(z)) for z, _ in found), default=0.0)
    if worst > max(tol, 1e-14) * 10:
        raise RootFindingError("root refinement did not reach tolerance", worst)
    # final merge at the user radius
    vals = [z for z, _ in found]
    groups = _cluster(vals, cluster_radius)
    merged = []
    for g in groups:
        mult = sum(found[i][1] for i in g)
        z = sum(found[i][0] * found[i][1] for i in g) / mult
        merged.append((complex(z), mult))
    merged.sort(key=lambda zm: (round(zm[0].real, 9), round(zm[0].imag, 9)))
    return RootMultiset(tuple(merged), cluster_radius, worst)


def _core_roots(p: UnivariateComplexPolynomial, tol, cluster_radius):
    coeffs = np.array(p.coefficients[::-1], dtype=complex)
    seeds = list(np.roots(coeffs)) if p.degree > 0 else []
    if len(seeds) != p.degree:  # pragma: no cover
        raise RootFindingError("companion eigenvalues missing", float("inf"))
    groups = _cluster(seeds, 2e-2)
    # the fast path is only trusted when every seed is isolated
    if all(len(g) == 1 for g in groups):
        out = []
        dp = p.derivative()
        for z in seeds:
            z = complex(z)
            for _ in range(50):
                d = dp(z)
                if d == 0:
                    break
                dz = p(z) / d
                z -= dz
                if abs(dz) <= 1e-16 * max(1.0, abs(z)):
                    break
            out.append(z)
        scale = lambda z: sum(abs(c) * abs(z) ** k for k, c in enumerate(p.coefficients))
        res = max(abs(p(z)) / scale(z) for z in out)
        if res <= tol and min(
            (abs(a - b) for i, a in enumerate(out) for b in out[i + 1 :]), default=1.0
        ) > cluster_radius:
            return [(z, 1) for z in out]
        # otherwise fall through to the careful path
    return _careful_roots(p, seeds, tol)


def _careful_roots(p: UnivariateComplexPolynomial, seeds, tol):
    exact = all(isinstance(c, (int, Fraction)) for c in p._exact)
    # floating coefficients only pin a multiple root down to their own precision
    vanish_tol = 1e-25 if exact else 1e-11
    with mpmath.workdps(60):
        found = _clustered_mp_roots(p.mp_coefficients(), seeds, vanish_tol)
    return [(complex(z), m) for z, m in found]


def mp_roots(coeffs_mp, vanish_tol=None):
    """Roots with multiplicity of a polynomial with mp coefficients (ascending).

    Runs at the ambient mpmath precision and returns mp values. ``vanish_tol``
    defaults to a threshold suited to coefficients carrying about 80% of the
    working digits.
    """
    coeffs = list(coeffs_mp)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) < 2:
        raise ValueError("roots need degree >= 1")
    if vanish_tol is None:
        vanish_tol = mpmath.mpf(10) ** (-int(mpmath.mp.dps * 0.45))
    low = 0
    while abs(coeffs[low]) == 0:
        low += 1
    out = [(mpmath.mpc(0), low)] if low else []
    core = coeffs[low:]
    if len(core) > 1:
        scale = max(abs(c) for c in core)
        seeds = np.roots(np.array([complex(c / scale) for c in reversed(core)], dtype=complex))
        out.extend(_clustered_mp_roots(core, list(seeds), vanish_tol))
    return out


def _clustered_mp_roots(coeffs_mp, seeds, vanish_tol):
    out = []
    leftovers = []
    for g in _cluster(seeds, 2e-2):
        m = len(g)
        centre = sum(complex(seeds[i]) for i in g) / m
        z = _mp_newton(coeffs_mp, centre, m)
        if _is_root_of_order(coeffs_mp, z, m, vanish_tol):
            out.append((z, m))
        else:
            leftovers.extend(g)
    if leftovers:
        polished = _aberth(coeffs_mp, [mpmath.mpc(complex(s)) for s in seeds])
        sub = [polished[i] for i in leftovers]
        subc = [complex(z) for z in sub]
        for h in _cluster(subc, 1e-6):
            m = len(h)
            centre = sum(sub[i] for i in h) / m
            z = _mp_newton(coeffs_mp, centre, m)
            if _is_root_of_order(coeffs_mp, z, m, vanish_tol):
                out.append((z, m))
            else:
                out.extend((_mp_newton(coeffs_mp, sub[i], 1), 1) for i in h)
    return out


def _is_root_of_order(coeffs_mp, z, m, vanish_tol) -> bool:
    """True when p and its first m-1 derivatives all vanish at z (relative scale)."""
    c = list(coeffs_mp)
    for _ in range(m):
        val = abs(mpmath.polyval(list(reversed(c)), z))
        sc = sum(abs(a) * abs(z) ** k for k, a in enumerate(c)) or 1
        if val / sc > vanish_tol:
            return False
        c = [k * a for k, a in enumerate(c)][1:]
    return True


def _aberth(coeffs_mp, zs, steps: int = 300):
    """Simultaneous Aberth-Ehrlich iteration at the ambient mp precision."""
    c = list(reversed(coeffs_mp))
    dc = list(reversed([k * a for k, a in enumerate(coeffs_mp)][1:]))
    zs = list(zs)
    n = len(zs)
    eps = mpmath.mpf(10) ** (-mpmath.mp.dps + 8)
    for _ in range(steps):
        biggest = 0
        for i in range(n):
            z = zs[i]
            pz = mpmath.polyval(c, z)
            if pz == 0:
                continue
            ratio = pz / mpmath.polyval(dc, z)
            s = mpmath.fsum(1 / (z - zs[j]) for j in range(n) if j != i and zs[j] != z)
            w = ratio / (1 - ratio * s)
            zs[i] = z - w
            biggest = max(biggest, abs(w) / max(1, abs(z)))
        if biggest < eps:
            break
    return zs
