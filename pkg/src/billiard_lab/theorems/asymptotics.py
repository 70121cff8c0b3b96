"""Asymptotics of tangent-line intersections between two germs at the origin.

The germ b is t -> (z, w) = (t^q_b, c_b t^p_b + ...), tangent to the z-axis.
For each small t the tangent line to b at b(t) is intersected with a second
germ a, and each intersection point is compared with b(t): the w-ratio when
a is transverse to b, the z-ratio when a is tangent. As t shrinks the ratios
should approach the limits predicted from the exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from ..polycore import parse_polynomial, roots

DEFAULT_T_VALUES = tuple(Fraction(1, 10 * 2**k) for k in range(13))
CROSSING_TOL = 1e-9
CONVERGENCE_TOL = 1e-3
MP_DPS = 50


class AsymptoticsError(ValueError):
    pass


class TrackingLostError(AsymptoticsError):
    """Two intersection families met within tolerance, so continuation is ambiguous."""


def _order(terms) -> float:
    return min((e for e, c in terms if c != 0), default=math.inf)


def _lead(terms):
    e = _order(terms)
    return next(c for k, c in terms if k == e)


@dataclass(frozen=True)
class PlaneGerm:
    """tau -> (z(tau), w(tau)) given by finite sums of (exponent, coefficient)."""

    z_terms: tuple
    w_terms: tuple
    label: str = ""

    def __post_init__(self):
        for e, _ in self.z_terms + self.w_terms:
            if not isinstance(e, int) or e < 1:
                raise AsymptoticsError(f"exponents must be positive integers, got {e!r}")
        if _order(self.z_terms) == math.inf and _order(self.w_terms) == math.inf:
            raise AsymptoticsError("constant germ")

    @classmethod
    def branch(cls, q: int, w_terms, label: str = ""):
        return cls(((q, 1),), tuple((int(e), c) for e, c in w_terms), label)

    @classmethod
    def axis(cls, which: str):
        if which == "z":
            return cls(((1, 1),), (), "z-axis")
        if which == "w":
            return cls((), ((1, 1),), "w-axis")
        raise AsymptoticsError(f"unknown axis {which!r}")

    @classmethod
    def from_text(cls, text: str, label: str = ""):
        """'z-axis', 'w-axis' or 'z(t), w(t)' with polynomial components in t."""
        text = text.strip()
        if text in ("z-axis", "w-axis"):
            return cls.axis(text[0])
        parts = [s for s in text.strip("()").split(",")]
        if len(parts) != 2:
            raise AsymptoticsError("expected two components 'z(t), w(t)'")
        comps = []
        for s in parts:
            p = parse_polynomial(s, ("t", "s_"))
            if any(e[1] for e in p.terms):
                raise AsymptoticsError("components may only use t")
            comps.append(tuple(sorted((e[0], c) for e, c in p.terms.items())))
        return cls(comps[0], comps[1], label or text)

    @classmethod
    def from_dict(cls, d: dict):
        if "axis" in d:
            return cls.axis(d["axis"])
        conv = lambda c: Fraction(c) if isinstance(c, (int, str)) else (complex(*c) if isinstance(c, list) else c)
        return cls(tuple((int(e), conv(c)) for e, c in d["z"]), tuple((int(e), conv(c)) for e, c in d["w"]), d.get("label", ""))

    @property
    def multiplicity(self) -> int:
        return int(min(_order(self.z_terms), _order(self.w_terms)))

    @property
    def tangent_to_z_axis(self) -> bool:
        return _order(self.w_terms) > _order(self.z_terms)

    @property
    def ratio(self):
        """ord w / ord z for a germ tangent to the z-axis (inf for the axis itself)."""
        ow, oz = _order(self.w_terms), _order(self.z_terms)
        if ow == math.inf:
            return math.inf
        return Fraction(int(ow), int(oz))

    @property
    def exact(self) -> bool:
        return all(isinstance(c, (int, Fraction)) for _, c in self.z_terms + self.w_terms)

    def z(self, t):
        return sum((c * t**e for e, c in self.z_terms), 0 * t)

    def w(self, t):
        return sum((c * t**e for e, c in self.w_terms), 0 * t)

    def dz(self, t):
        return sum((e * c * t ** (e - 1) for e, c in self.z_terms), 0 * t)

    def dw(self, t):
        return sum((e * c * t ** (e - 1) for e, c in self.w_terms), 0 * t)

    def to_dict(self):
        f = lambda c: str(c) if isinstance(c, (int, Fraction)) else [complex(c).real, complex(c).imag]
        return {"z": [[e, f(c)] for e, c in self.z_terms], "w": [[e, f(c)] for e, c in self.w_terms], "label": self.label}


def r_polynomial_roots(p_a: int, q_a: int, c, r) -> list[complex]:
    """Roots of c zeta^p_a - r zeta^q_a + r - 1, repeated by multiplicity."""
    r = Fraction(r)
    coeffs = [0] * (p_a + 1)
    coeffs[0] = r - 1
    coeffs[q_a] = coeffs[q_a] - r
    coeffs[p_a] = coeffs[p_a] + c
    return roots(coeffs).values()


@dataclass
class Family:
    factors: list
    sizes: list  # |z| + |w| of the intersection point
    local: bool = False
    predicted: object = None
    errors: list = field(default_factory=list)
    monotone: bool = False
    verdict: str = ""

    def to_dict(self):
        c = lambda z: [complex(z).real, complex(z).imag]
        return {
            "factors": [c(z) for z in self.factors],
            "local": self.local,
            "predicted": None if self.predicted is None else c(self.predicted),
            "final_error": self.errors[-1] if self.errors else None,
            "monotone": self.monotone,
            "verdict": self.verdict,
        }


@dataclass
class AsymptoticsReport:
    case: str
    coordinate: str
    predicted: list
    t_values: list
    families: list
    verdict: str

    def local_families(self):
        return [f for f in self.families if f.local]

    def to_dict(self):
        c = lambda z: [complex(z).real, complex(z).imag]
        return {
            "case": self.case,
            "coordinate": self.coordinate,
            "predicted": [c(z) for z in self.predicted],
            "t_values": [float(t) for t in self.t_values],
            "families": [f.to_dict() for f in self.families if f.local],
            "verdict": self.verdict,
        }


def _classify(b: PlaneGerm, a: PlaneGerm):
    """(case, coordinate, scale exponent of tau in t, predicted factors or None)."""
    rb = b.ratio
    if not a.tangent_to_z_axis:
        return "transverse", "w", Fraction(int(_order(b.w_terms)), a.multiplicity), [1 - rb]
    ra = a.ratio
    qb = b.multiplicity
    qa = a.multiplicity
    scale = Fraction(qb, qa)
    if ra > rb:
        return "tangent, higher exponent", "z", scale, [(rb - 1) / rb] * qa
    if ra == rb:
        c = _lead(a.w_terms) / _lead(b.w_terms)
        zetas = r_polynomial_roots(int(_order(a.w_terms)), qa, c, rb)
        return "tangent, equal exponent", "z", scale, [z**qa for z in zetas]
    return "tangent, lower exponent", "z", scale, None


def _to_mp(c):
    if isinstance(c, Fraction):
        return mpmath.mpf(c.numerator) / c.denominator
    if isinstance(c, complex):
        return mpmath.mpc(c)
    return mpmath.mpf(c) if not isinstance(c, (mpmath.mpf, mpmath.mpc)) else c


def _mp_germ(g: PlaneGerm) -> PlaneGerm:
    return PlaneGerm(tuple((e, _to_mp(c)) for e, c in g.z_terms), tuple((e, _to_mp(c)) for e, c in g.w_terms), g.label)


def _section(b: PlaneGerm, a: PlaneGerm, t, scale_exp: Fraction, exact: bool):
    """Scaled roots sigma (tau = lambda sigma) of the tangent-line equation at b(t)."""
    if exact:
        lam = t ** scale_exp.numerator
    else:
        t = _to_mp(t)
        lam = t ** (mpmath.mpf(scale_exp.numerator) / scale_exp.denominator)
        a, b = _mp_germ(a), _mp_germ(b)
    slope = b.dw(t) / b.dz(t)
    deg = max((e for e, _ in a.z_terms + a.w_terms), default=0)
    coeffs = [0] * (deg + 1)
    coeffs[0] = slope * b.z(t) - b.w(t)
    for e, c in a.w_terms:
        coeffs[e] += c * lam**e
    for e, c in a.z_terms:
        coeffs[e] -= slope * c * lam**e
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) < 2:
        return lam, []
    if exact and len(coeffs) == 2:
        return lam, [-Fraction(coeffs[0]) / coeffs[1]]
    if not exact:
        big = max(abs(c) for c in coeffs)
        coeffs = [complex(c / big) for c in coeffs]
        # drop what float noise leaves of exactly cancelling terms
        coeffs = [c if abs(c) > 1e-40 else 0 for c in coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
    else:
        big = max(abs(c) for c in coeffs)
        coeffs = [Fraction(c) / big for c in coeffs]
    return lam, roots(coeffs).values()


def _factor(b, a, t, lam, sigma, coordinate, exact):
    if exact and isinstance(sigma, Fraction):
        tau = lam * sigma
    else:
        a, b, t = _mp_germ(a), _mp_germ(b), _to_mp(t)
        tau = _to_mp(lam) * mpmath.mpc(complex(sigma))
    num = a.w(tau) if coordinate == "w" else a.z(tau)
    den = b.w(t) if coordinate == "w" else b.z(t)
    size = abs(complex(a.z(tau))) + abs(complex(a.w(tau)))
    return num / den, size


def _track(prev: list, new: list) -> list:
    """Assign each previous family the nearest unused new value."""
    used = [False] * len(new)
    out = []
    for v in prev:
        order = sorted(range(len(new)), key=lambda j: abs(complex(new[j]) - complex(v)))
        order = [j for j in order if not used[j]]
        if not order:
            raise TrackingLostError("fewer intersections than families")
        j = order[0]
        if len(order) > 1:
            k = order[1]
            gap = abs(complex(new[k]) - complex(new[j]))
            if 0 < gap <= CROSSING_TOL * max(1.0, abs(complex(new[j]))):
                raise TrackingLostError(f"families cross near {complex(new[j]):.6g}")
        used[j] = True
        out.append(j)
    return out


def verify_tangent_asymptotics(
    b: PlaneGerm, a: PlaneGerm, t_values: Sequence = DEFAULT_T_VALUES, tol: float = CONVERGENCE_TOL
) -> AsymptoticsReport:
    if not b.tangent_to_z_axis or b.ratio == math.inf:
        raise AsymptoticsError("b must be a nonlinear germ tangent to the z-axis")
    if b.z_terms != ((b.multiplicity, 1),):
        raise AsymptoticsError("b must be parametrized with z = t^q")
    case, coord, scale_exp, predicted = _classify(b, a)
    exact = a.exact and b.exact and scale_exp.denominator == 1 and all(isinstance(t, Fraction) for t in t_values)
    with mpmath.workdps(MP_DPS):
        return _run(b, a, t_values, tol, case, coord, scale_exp, predicted, exact)


def _run(b, a, t_values, tol, case, coord, scale_exp, predicted, exact):
    families: list[Family] = []
    sigmas: list = []
    for i, t in enumerate(t_values):
        lam, sig = _section(b, a, t, scale_exp, exact)
        if i == 0:
            sigmas = list(sig)
            families = [Family([], []) for _ in sig]
            idx = list(range(len(sig)))
        else:
            if len(sig) != len(sigmas):
                raise TrackingLostError("the number of intersections changed")
            idx = _track(sigmas, sig)
            sigmas = [sig[j] for j in idx]
        for fam, s in zip(families, sigmas):
            fac, size = _factor(b, a, t, lam, s, coord, exact)
            fam.factors.append(fac)
            fam.sizes.append(size)
    for fam in families:
        sz = fam.sizes
        fam.local = len(sz) >= 3 and sz[-1] < 0.5 * sz[0] and sz[-1] <= sz[-2] <= sz[-3]
    local = [f for f in families if f.local]
    if predicted is None:
        for fam in local:
            fam.verdict = "decay-only"
        return AsymptoticsReport(case, coord, [], list(t_values), families, "decay-only")
    verdict = "converged"
    # closest (family, prediction) pairs first, each prediction used once
    cands = sorted(
        ((abs(complex(fam.factors[-1]) - complex(pv)), i, j) for i, fam in enumerate(local) for j, pv in enumerate(predicted)),
        key=lambda x: x[0],
    )
    taken_f, taken_p = set(), set()
    for _, i, j in cands:
        if i in taken_f or j in taken_p:
            continue
        taken_f.add(i)
        taken_p.add(j)
        fam, target = local[i], predicted[j]
        fam.predicted = target
        if isinstance(target, Fraction) and all(isinstance(f, Fraction) for f in fam.factors):
            fam.errors = [abs(float(f - target)) for f in fam.factors]
        else:
            fam.errors = [abs(complex(f) - complex(target)) for f in fam.factors]
        e = [x if x > 1e-13 else 0.0 for x in fam.errors[-3:]]
        fam.monotone = e[0] >= e[1] >= e[2]
        fam.verdict = "converged" if fam.errors[-1] <= tol and fam.monotone else "not converged"
    for i, fam in enumerate(local):
        if i in taken_f:
            continue
        # beyond the first q_a families of a higher-exponent germ z(t) = o(z(xi)): the ratio grows while xi -> 0
        f = [abs(complex(x)) for x in fam.factors[-3:]]
        if case == "tangent, higher exponent" and f[0] <= f[1] <= f[2]:
            fam.verdict = "escaping"
        else:
            fam.verdict = "unpredicted"
    if len(taken_p) < len(predicted) or any(f.verdict in ("not converged", "unpredicted") for f in local):
        verdict = "mismatch"
    return AsymptoticsReport(case, coord, list(predicted or []), list(t_values), families, verdict)
