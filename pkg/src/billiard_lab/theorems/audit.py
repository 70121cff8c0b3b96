"""Root powers of W-polynomials and the symmetry-about-one audit.

For a collection of triples (p_i, q_i, c_i) with a shared ratio r = p_i/q_i,
W_i(theta) = (r-1) theta^p_i - r theta^(p_i - q_i) + c_i. The q_i-th powers of
the roots are split into the powers equal to 2, the powers equal to
(r-2)/(r-1), and the rest (M). The audit reports whether M is symmetric
about 1 and how far the counting identity (r-2) Pi = k2 - k1 (r-1) is from
holding.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ..polycore import RootFindingError, UnivariateComplexPolynomial, roots

TARGET_TOL = 1e-6
BORDERLINE_TOL = 1e-3
DEFAULT_C_VALUES = (Fraction(1, 2), Fraction(1), Fraction(2), complex(1, 1))
DEFAULT_MAX_P = 12


class AuditError(ValueError):
    pass


def _exact(c):
    if isinstance(c, (int, Fraction)):
        return Fraction(c)
    c = complex(c)
    if c.imag == 0 and float(c.real).is_integer():
        return Fraction(int(c.real))
    return c


@dataclass(frozen=True)
class GermTriple:
    p: int
    q: int
    c: object  # Fraction or complex, nonzero

    def __post_init__(self):
        if not (isinstance(self.p, int) and isinstance(self.q, int)) or self.q < 1 or self.p <= self.q:
            raise AuditError(f"need integers p > q >= 1, got ({self.p}, {self.q})")
        if self.c == 0:
            raise AuditError("c must be nonzero")
        object.__setattr__(self, "c", _exact(self.c))

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.p, self.q)

    def to_list(self):
        c = complex(self.c)
        return [self.p, self.q, str(self.c) if isinstance(self.c, Fraction) else [c.real, c.imag]]


def w_polynomial(t: GermTriple, r=None) -> UnivariateComplexPolynomial:
    """(r-1) theta^p - r theta^(p-q) + c, ascending coefficients kept exact when c is rational."""
    r = t.ratio if r is None else Fraction(r)
    if r != t.ratio:
        raise AuditError(f"triple ({t.p},{t.q}) has ratio {t.ratio}, not {r}")
    coeffs = [0] * (t.p + 1)
    coeffs[0] = t.c
    coeffs[t.p - t.q] = coeffs[t.p - t.q] - r
    coeffs[t.p] = coeffs[t.p] + (r - 1)
    return UnivariateComplexPolynomial(coeffs)


def symmetry_about(values: Sequence[complex], center: complex, tol: float):
    """Sort by real part, then greedily pair each x with the nearest unused partner to 2 center - x.

    Returns (pairs, unmatched values, defect). An unmatched value counts with
    |x - center| in the defect, since only the center may pair with itself.
    """
    vals = sorted((complex(v) for v in values), key=lambda z: (z.real, z.imag))
    used = [False] * len(vals)
    pairs, unmatched, defect = [], [], 0.0
    for i, x in enumerate(vals):
        if used[i]:
            continue
        used[i] = True
        target = 2 * center - x
        best, bestd = None, math.inf
        for j, y in enumerate(vals):
            if not used[j] and abs(y - target) < bestd:
                best, bestd = j, abs(y - target)
        if best is not None and bestd <= tol:
            used[best] = True
            pairs.append((x, vals[best]))
            defect = max(defect, abs((x + vals[best]) / 2 - center))
        elif abs(x - center) <= tol:
            pairs.append((x, x))
            defect = max(defect, abs(x - center))
        else:
            unmatched.append(x)
            defect = max(defect, abs(x - center))
    return pairs, unmatched, defect


@dataclass
class CollectionAudit:
    r: Fraction
    triples: list
    total: int  # sum of p_i, the number of roots with multiplicity
    powers: list
    k1: int
    k2: int
    borderline: list
    residual_multiset: list
    m_defect: float
    m_unmatched: int
    power_sum_residual: float
    per_triple_power_sum_residuals: list
    identity_residual: float
    tol: float = 1e-8

    @property
    def m_symmetric(self) -> bool:
        return self.m_unmatched == 0 and self.m_defect <= self.tol

    @property
    def identity_holds(self) -> bool:
        return abs(self.identity_residual) <= self.tol

    def to_dict(self) -> dict:
        c = lambda z: [complex(z).real, complex(z).imag]
        return {
            "r": str(self.r),
            "triples": [t.to_list() for t in self.triples],
            "total": self.total,
            "powers": [c(z) for z in self.powers],
            "k1": self.k1,
            "k2": self.k2,
            "borderline": [c(z) for z in self.borderline],
            "residual_multiset": [c(z) for z in self.residual_multiset],
            "m_defect": self.m_defect,
            "m_unmatched": self.m_unmatched,
            "m_symmetric": self.m_symmetric,
            "power_sum_residual": self.power_sum_residual,
            "identity_residual": self.identity_residual,
            "identity_holds": self.identity_holds,
        }


def root_powers(t: GermTriple, r=None) -> list[complex]:
    """theta^q over the roots of W, repeated by multiplicity."""
    ms = roots(w_polynomial(t, r))
    return [z**t.q for z in ms.values()]


def audit_collection(triples: Iterable[GermTriple], tol: float = 1e-8) -> CollectionAudit:
    triples = list(triples)
    if not triples:
        raise AuditError("empty collection")
    r = triples[0].ratio
    for t in triples:
        if t.p * triples[0].q != t.q * triples[0].p:
            raise AuditError(f"triple ({t.p},{t.q}) does not share the ratio {r}")
    two, low = 2.0, float((r - 2) / (r - 1))
    powers, per = [], []
    for t in triples:
        pw = root_powers(t, r)
        per.append(abs(sum(pw) - t.p / float(r - 1)))
        powers.extend(pw)
    k1 = k2 = 0
    rest, border = [], []
    for z in powers:
        d2, dl = abs(z - two), abs(z - low)
        if d2 <= TARGET_TOL:
            k1 += 1
        elif dl <= TARGET_TOL:
            k2 += 1
        else:
            if min(d2, dl) <= BORDERLINE_TOL:
                border.append(z)
            rest.append(z)
    total = sum(t.p for t in triples)
    scale = max(1.0, max((abs(z) for z in rest), default=1.0))
    _, unmatched, defect = symmetry_about(rest, 1.0, tol * scale)
    rf = float(r)
    return CollectionAudit(
        r=r,
        triples=triples,
        total=total,
        powers=powers,
        k1=k1,
        k2=k2,
        borderline=border,
        residual_multiset=rest,
        m_defect=defect,
        m_unmatched=len(unmatched),
        power_sum_residual=abs(sum(powers) - total / (rf - 1)),
        per_triple_power_sum_residuals=per,
        identity_residual=(rf - 2) * total - (k2 - k1 * (rf - 1)),
        tol=tol,
    )


# -- lemma scan -------------------------------------------------------------------------------


def pairs_with_ratio(r, max_p: int = DEFAULT_MAX_P) -> list[tuple[int, int]]:
    r = Fraction(r)
    out = []
    s = 1
    while r.numerator * s <= max_p:
        out.append((r.numerator * s, r.denominator * s))
        s += 1
    return out


def default_collections(r, max_p: int = DEFAULT_MAX_P, c_values=DEFAULT_C_VALUES) -> list[list[GermTriple]]:
    """Every single triple over the (p, q) and c grids, plus one mixed collection cycling the c values."""
    pq = pairs_with_ratio(r, max_p)
    out = [[GermTriple(p, q, c)] for (p, q), c in itertools.product(pq, c_values)]
    cyc = itertools.cycle(c_values)
    out.append([GermTriple(p, q, next(cyc)) for p, q in pq])
    return out


@dataclass
class ScanRow:
    r: Fraction
    collection: list
    m_defect: float
    m_symmetric: bool
    identity_residual: float
    power_sum_residual: float

    def csv_row(self) -> list:
        coll = ";".join(f"({t.p},{t.q},{_fmt_c(t.c)})" for t in self.collection)
        return [str(self.r), coll, f"{self.m_defect:.6e}", int(self.m_symmetric), f"{self.identity_residual:.6e}", f"{self.power_sum_residual:.3e}"]


def _fmt_c(c):
    if isinstance(c, Fraction):
        return str(c)
    c = complex(c)
    return f"{c.real:g}{c.imag:+g}i"


@dataclass
class LemmaScan:
    rows: list
    tol: float

    @property
    def symmetric_ratios(self) -> list:
        return sorted({row.r for row in self.rows if row.m_symmetric})

    @property
    def only_at_two(self) -> bool:
        return all(r == 2 for r in self.symmetric_ratios)

    def column(self, r):
        return [row for row in self.rows if row.r == Fraction(r)]

    def to_dict(self) -> dict:
        cols = {}
        for row in self.rows:
            col = cols.setdefault(str(row.r), {"collections": 0, "symmetric": 0, "max_identity_residual": 0.0, "min_identity_residual": math.inf, "min_defect": math.inf})
            col["collections"] += 1
            col["symmetric"] += int(row.m_symmetric)
            col["max_identity_residual"] = max(col["max_identity_residual"], abs(row.identity_residual))
            col["min_identity_residual"] = min(col["min_identity_residual"], abs(row.identity_residual))
            col["min_defect"] = min(col["min_defect"], row.m_defect)
        return {"tol": self.tol, "columns": cols, "symmetric_ratios": [str(r) for r in self.symmetric_ratios], "only_at_two": self.only_at_two}

    CSV_HEADER = ["r", "collection", "m_defect", "m_symmetric", "identity_residual", "power_sum_residual"]


def lemma_scan(ratios: Iterable, tol: float = 1e-8, max_p: int = DEFAULT_MAX_P, c_values=DEFAULT_C_VALUES) -> LemmaScan:
    rows = []
    for r in ratios:
        r = Fraction(r)
        if r <= 1:
            raise AuditError(f"ratio must exceed 1, got {r}")
        for coll in default_collections(r, max_p, c_values):
            a = audit_collection(coll, tol)
            rows.append(ScanRow(r, coll, a.m_defect, a.m_symmetric, a.identity_residual, a.power_sum_residual))
    return LemmaScan(rows, tol)


def random_triples(n: int, rng: np.random.Generator, max_p: int = 40) -> list[GermTriple]:
    """Random (p, q, c) with 1 <= q < p <= max_p and complex c of modulus in [0.1, 3]."""
    out = []
    while len(out) < n:
        p = int(rng.integers(2, max_p + 1))
        q = int(rng.integers(1, p))
        mod, arg = rng.uniform(0.1, 3.0), rng.uniform(0, 2 * math.pi)
        out.append(GermTriple(p, q, complex(mod * math.cos(arg), mod * math.sin(arg))))
    return out


def power_sum_residual(t: GermTriple) -> float:
    """|sum theta^q - p/(r-1)| over the roots of W."""
    try:
        pw = root_powers(t)
    except RootFindingError:
        raise
    return abs(sum(pw) - t.p / float(t.ratio - 1))
