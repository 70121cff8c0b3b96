"""Sparse polynomials with exact rational coefficients.

Two concrete types are exposed: :class:`BivariatePolynomial` for affine
equations and integrals, and :class:`HomogeneousPolynomial` for curves in
CP^2 with homogeneous coordinates ``(x0 : x1 : x2)``.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import comb
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

Exponent = tuple[int, ...]


def as_fraction(value) -> Fraction:
    """Coerce an exact scalar to Fraction; floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        return Fraction(int(value))
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"exact rational coefficient required, got {type(value).__name__}")


class _SparsePolynomial:
    """Shared machinery: immutable map exponent tuple -> nonzero Fraction."""

    __slots__ = ("_terms", "_hash")
    nvars = 0

    def __init__(self, terms: Mapping[Exponent, object] | None = None):
        clean: dict[Exponent, Fraction] = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.nvars or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent {exps} for {self.nvars} variables")
            c = as_fraction(coeff)
            if c:
                clean[exps] = clean.get(exps, Fraction(0)) + c
                if not clean[exps]:
                    del clean[exps]
        self._terms = MappingProxyType(clean)
        self._hash = None

    # construction helpers -------------------------------------------------

    def _new(self, terms):
        return type(self)(terms, **self._extra())

    def _extra(self) -> dict:
        return {}

    # basic protocol ---------------------------------------------------------

    @property
    def terms(self) -> Mapping[Exponent, Fraction]:
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def total_degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return dict(self._terms) == dict(other._terms) and self._extra() == other._extra()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__, frozenset(self._terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def coefficient(self, *exps: int) -> Fraction:
        return self._terms.get(tuple(exps), Fraction(0))

    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        """Terms in graded lexicographic order, highest first."""
        return sorted(self._terms.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True)

    # arithmetic ---------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, type(self)):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._constant(other)
        return None

    def _constant(self, value):
        if value == 0:
            return self._new({})
        return self._new({(0,) * self.nvars: value})

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = dict(self._terms)
        for e, c in other._terms.items():
            terms[e] = terms.get(e, 0) + c
        return self._new(terms)

    __radd__ = __add__

    def __neg__(self):
        return self._new({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._new({e: c * other for e, c in self._terms.items()})
        if not isinstance(other, type(self)):
            return NotImplemented
        terms: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return self._new(terms)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if other == 0:
                raise ZeroDivisionError("polynomial division by zero")
            return self * (Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        result = self._constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def diff(self, var: int):
        terms = {}
        for e, c in self._terms.items():
            if e[var]:
                ne = list(e)
                ne[var] -= 1
                terms[tuple(ne)] = c * e[var]
        return self._derived(terms)

    def _derived(self, terms):
        return self._new(terms)

    def __call__(self, *point):
        """Evaluate at a point; exact for rational input, otherwise in the input's arithmetic."""
        if len(point) != self.nvars:
            raise ValueError(f"expected {self.nvars} coordinates")
        if not self._terms:
            return 0
        maxdeg = [max(e[k] for e in self._terms) for k in range(self.nvars)]
        powers = []
        for k, v in enumerate(point):
            pw = [1]
            for _ in range(maxdeg[k]):
                pw.append(pw[-1] * v)
            powers.append(pw)
        total = 0
        for e, c in self._terms.items():
            term = _scalar(c, point[0])
            for k in range(self.nvars):
                if e[k]:
                    term = term * powers[k][e[k]]
            total = total + term
        return total


def _scalar(c: Fraction, like):
    """Convert a Fraction coefficient into the arithmetic of ``like``."""
    if isinstance(like, (int, Fraction)):
        return c
    if isinstance(like, (float, complex)):
        return c.numerator / c.denominator
    try:
        import mpmath

        if isinstance(like, (mpmath.mpf, mpmath.mpc)):
            return mpmath.mpf(c.numerator) / c.denominator
    except ImportError:  # pragma: no cover
        pass
    return c.numerator / c.denominator


class BivariatePolynomial(_SparsePolynomial):
    """Polynomial in two affine variables with exact rational coefficients."""

    __slots__ = ("variables",)
    nvars = 2

    def __init__(self, terms=None, variables: Sequence[str] = ("x", "y")):
        super().__init__(terms)
        if len(variables) != 2 or variables[0] == variables[1]:
            raise ValueError("need two distinct variable names")
        self.variables = tuple(variables)

    def _extra(self):
        return {"variables": self.variables}

    @classmethod
    def variable(cls, index: int, variables=("x", "y")):
        e = [0, 0]
        e[index] = 1
        return cls({tuple(e): 1}, variables)

    @classmethod
    def constant(cls, value, variables=("x", "y")):
        return cls({(0, 0): value} if value else {}, variables)

    @property
    def degree(self) -> int:
        return self.total_degree

    def degree_in(self, var: int) -> int:
        return max((e[var] for e in self._terms), default=-1)

    def __repr__(self):
        return f"BivariatePolynomial({str(self)!r})"

    def __str__(self):
        return format_polynomial(self, self.variables)

    def translate(self, a, b) -> "BivariatePolynomial":
        """Return p(x + a, y + b) exactly (a, b rational)."""
        return self.substitute_affine(((1, 0), (0, 1)), (a, b))

    def substitute_affine(self, matrix, shift=(0, 0)) -> "BivariatePolynomial":
        """Return p(m00*x + m01*y + s0, m10*x + m11*y + s1)."""
        x = BivariatePolynomial.variable(0, self.variables)
        y = BivariatePolynomial.variable(1, self.variables)
        (m00, m01), (m10, m11) = matrix
        nx = x * as_fraction(m00) + y * as_fraction(m01) + as_fraction(shift[0])
        ny = x * as_fraction(m10) + y * as_fraction(m11) + as_fraction(shift[1])
        return _substitute(self, [nx, ny], BivariatePolynomial.constant(1, self.variables))

    def homogenize(self, degree: int | None = None) -> "HomogeneousPolynomial":
        return homogenize(self, degree)


class HomogeneousPolynomial(_SparsePolynomial):
    """Homogeneous form F(x0, x1, x2) of fixed degree.

    The zero form is allowed and keeps the nominal degree it was built with.
    """

    __slots__ = ("degree",)
    nvars = 3

    def __init__(self, terms=None, degree: int | None = None):
        super().__init__(terms)
        degs = {sum(e) for e in self._terms}
        if len(degs) > 1:
            raise ValueError(f"terms of mixed degrees {sorted(degs)}")
        if degs:
            d = degs.pop()
            if degree is not None and degree != d:
                raise ValueError(f"declared degree {degree} but terms have degree {d}")
            degree = d
        if degree is None:
            raise ValueError("zero form needs an explicit degree")
        self.degree = int(degree)

    def _extra(self):
        return {"degree": self.degree}

    def _constant(self, value):
        if self.degree != 0 and value != 0:
            raise ValueError("cannot add a constant to a form of positive degree")
        return HomogeneousPolynomial({(0, 0, 0): value} if value else {}, degree=0)

    def _derived(self, terms):
        return HomogeneousPolynomial(terms, degree=max(self.degree - 1, 0))

    def __add__(self, other):
        if isinstance(other, HomogeneousPolynomial) and other.degree != self.degree:
            if other.is_zero():
                return self
            if self.is_zero():
                return other
            raise ValueError("cannot add forms of different degree")
        return super().__add__(other)

    def __mul__(self, other):
        if isinstance(other, HomogeneousPolynomial):
            terms: dict[Exponent, Fraction] = {}
            for e1, c1 in self._terms.items():
                for e2, c2 in other._terms.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    terms[e] = terms.get(e, 0) + c1 * c2
            return HomogeneousPolynomial(terms, degree=self.degree + other.degree)
        return super().__mul__(other)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = HomogeneousPolynomial({(0, 0, 0): 1}, degree=0)
        for _ in range(n):
            result = result * self
        return result

    @classmethod
    def variable(cls, index: int):
        e = [0, 0, 0]
        e[index] = 1
        return cls({tuple(e): 1})

    def __repr__(self):
        return f"HomogeneousPolynomial({str(self)!r})"

    def __str__(self):
        return format_polynomial(self, ("x0", "x1", "x2"))

    def dehomogenize(self, chart: int, variables=None) -> BivariatePolynomial:
        """Set x_chart = 1; the remaining coordinates keep their index order."""
        if chart not in (0, 1, 2):
            raise ValueError("chart index must be 0, 1 or 2")
        keep = [k for k in range(3) if k != chart]
        if variables is None:
            variables = ("x", "y") if chart == 0 else ("z", "w")
        terms: dict[tuple[int, int], Fraction] = {}
        for e, c in self._terms.items():
            key = (e[keep[0]], e[keep[1]])
            terms[key] = terms.get(key, 0) + c
        return BivariatePolynomial(terms, variables)

    def transform(self, matrix) -> "HomogeneousPolynomial":
        """Return F(M @ X): substitute x_i -> sum_j M[i][j] x_j (exact)."""
        lin = []
        for row in matrix:
            lin.append(
                HomogeneousPolynomial(
                    {tuple(1 if k == j else 0 for k in range(3)): as_fraction(row[j]) for j in range(3)},
                    degree=1,
                )
            )
        one = HomogeneousPolynomial({(0, 0, 0): 1}, degree=0)
        out = _substitute(self, lin, one)
        return HomogeneousPolynomial(out.terms, degree=self.degree)

    def binary_form_at_infinity(self) -> list[Fraction]:
        """Coefficients a_k of F(0, x1, x2) = sum_k a_k x1^(d-k) x2^k."""
        d = self.degree
        return [self.coefficient(0, d - k, k) for k in range(d + 1)]


def _substitute(poly: _SparsePolynomial, images: list, one):
    """Substitute each variable by a polynomial; caches powers."""
    cache: list[dict[int, object]] = [{0: one} for _ in images]

    def power(k, n):
        if n not in cache[k]:
            cache[k][n] = power(k, n - 1) * images[k]
        return cache[k][n]

    result = None
    for e, c in poly.terms.items():
        term = one * c
        for k, n in enumerate(e):
            if n:
                term = term * power(k, n)
        result = term if result is None else result + term
    if result is None:
        return type(one)({}, **one._extra())
    return result


def homogenize(p: BivariatePolynomial, degree: int | None = None) -> HomogeneousPolynomial:
    """x = x1/x0, y = x2/x0; multiply through by x0^degree."""
    d = p.degree if degree is None else int(degree)
    if p.is_zero():
        return HomogeneousPolynomial({}, degree=max(d, 0))
    if d < p.degree:
        raise ValueError(f"degree {d} is below the polynomial degree {p.degree}")
    return HomogeneousPolynomial({(d - i - j, i, j): c for (i, j), c in p.terms.items()}, degree=d)


def dehomogenize(F: HomogeneousPolynomial, chart: int, variables=None) -> BivariatePolynomial:
    return F.dehomogenize(chart, variables)


def skew_hessian(F: BivariatePolynomial) -> BivariatePolynomial:
    """F_xx F_y^2 - 2 F_xy F_x F_y + F_yy F_x^2: the Hessian form on the skew gradient."""
    fx, fy = F.diff(0), F.diff(1)
    fxx, fxy, fyy = fx.diff(0), fx.diff(1), fy.diff(1)
    return fxx * fy * fy - 2 * fxy * fx * fy + fyy * fx * fx


def projective_hessian(F: HomogeneousPolynomial) -> HomogeneousPolynomial:
    """det of the 3x3 matrix of second partials; degree 3(d-2), possibly zero."""
    if F.degree < 2:
        raise ValueError("Hessian needs degree >= 2")
    first = [F.diff(i) for i in range(3)]
    m = [[first[i].diff(j) for j in range(3)] for i in range(3)]
    det = (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )
    return HomogeneousPolynomial(det.terms, degree=3 * (F.degree - 2))


def taylor_coefficients(p: _SparsePolynomial, point) -> dict[Exponent, object]:
    """Coefficients of p(point + h) as a polynomial in h, in the point's arithmetic.

    Uses exact derivative polynomials, so only the evaluation is inexact.
    """
    n = p.nvars
    degs = [max((e[k] for e in p.terms), default=0) for k in range(n)]
    out = {}
    for alpha in product(*(range(d + 1) for d in degs)):
        # coefficient of h^alpha = sum_e c_e prod_k binom(e_k, alpha_k) point_k^(e_k - alpha_k)
        terms = {}
        for e, c in p.terms.items():
            if all(e[k] >= alpha[k] for k in range(n)):
                f = c
                for k in range(n):
                    f *= comb(e[k], alpha[k])
                ne = tuple(e[k] - alpha[k] for k in range(n))
                terms[ne] = terms.get(ne, 0) + f
        if terms:
            q = type(p).__new__(type(p))
            _SparsePolynomial.__init__(q, terms)
            if isinstance(p, BivariatePolynomial):
                q.variables = p.variables
            elif isinstance(p, HomogeneousPolynomial):
                q.degree = p.degree - sum(alpha)
            val = q(*point)
            if val != 0:
                out[alpha] = val
    return out


def format_polynomial(p: _SparsePolynomial, names: Iterable[str]) -> str:
    names = list(names)
    items = p.sorted_terms()
    if not items:
        return "0"
    parts = []
    for idx, (e, c) in enumerate(items):
        mono = "*".join(
            (n if k == 1 else f"{n}^{k}") for n, k in zip(names, e) if k
        )
        mag = abs(c)
        if mono:
            body = mono if mag == 1 else f"{_fmt_rational(mag)}*{mono}"
        else:
            body = _fmt_rational(mag)
        if idx == 0:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)


def _fmt_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
