from fractions import Fraction as Fr

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from billiard_lab.polycore import (
    BivariatePolynomial,
    HomogeneousPolynomial,
    NonRationalLiteralError,
    ParseError,
    RootFindingError,
    UnivariateComplexPolynomial,
    UnknownVariableError,
    homogenize,
    parse_homogeneous,
    parse_polynomial,
    projective_hessian,
    roots,
    skew_hessian,
)
from billiard_lab.polycore.poly import taylor_coefficients

X, Y = sympy.symbols("x y")


def to_sympy(p):
    return sympy.expand(sum(sympy.Rational(c.numerator, c.denominator) * X**i * Y**j for (i, j), c in p.terms.items()))


# -- parsing -----------------------------------------------------------------


@pytest.mark.parametrize(
    "text, terms",
    [
        ("y^2 - x^3", {(0, 2): 1, (3, 0): -1}),
        ("x^2/4 + y^2 - 1", {(2, 0): Fr(1, 4), (0, 2): 1, (0, 0): -1}),
        ("(x*y - 1)", {(1, 1): 1, (0, 0): -1}),
        ("-x + 2/3*y^0", {(1, 0): -1, (0, 0): Fr(2, 3)}),
        ("(x+y)^2 - x^2 - y^2", {(1, 1): 2}),
        ("x - x", {}),
    ],
)
def test_parse_examples(text, terms):
    assert dict(parse_polynomial(text).terms) == {k: Fr(v) for k, v in terms.items()}


@pytest.mark.parametrize(
    "text, err, pos",
    [
        ("2x", ParseError, 1),
        ("x + 1.5", NonRationalLiteralError, 4),
        ("x + z", UnknownVariableError, 4),
        ("x^", ParseError, 2),
        ("(x + y", ParseError, 6),
        ("x*/y", ParseError, 2),
        ("x/y", ParseError, 2),
        ("x/0", ParseError, 2),
        ("", ParseError, 0),
    ],
)
def test_parse_errors(text, err, pos):
    with pytest.raises(err) as info:
        parse_polynomial(text)
    assert info.value.position == pos


def test_zero_prints_as_zero():
    assert str(parse_polynomial("x - x")) == "0"
    assert str(BivariatePolynomial()) == "0"


def test_custom_variable_names():
    p = parse_polynomial("z - w^2", ("z", "w"))
    assert dict(p.terms) == {(1, 0): 1, (0, 2): -1}
    with pytest.raises(UnknownVariableError):
        parse_polynomial("x", ("z", "w"))


sparse_terms = st.dictionaries(
    st.tuples(st.integers(0, 6), st.integers(0, 6)),
    st.fractions(min_value=-50, max_value=50, max_denominator=12),
    max_size=8,
)


@given(sparse_terms)
def test_print_parse_roundtrip(terms):
    p = BivariatePolynomial(terms)
    assert parse_polynomial(str(p)) == p


@given(sparse_terms)
def test_homogenize_roundtrip(terms):
    p = BivariatePolynomial(terms)
    if p.is_zero():
        return
    for extra in (0, 2):
        F = homogenize(p, p.degree + extra)
        assert all(sum(e) == F.degree for e in F.terms)
        assert F.dehomogenize(0) == p


def test_homogenize_examples():
    assert homogenize(parse_polynomial("y - x^2"), 2) == parse_homogeneous("x0*x2 - x1^2")
    assert homogenize(parse_polynomial("x*y - 1"), 2) == parse_homogeneous("x1*x2 - x0^2")
    chart2 = parse_homogeneous("x0*x2 - x1^2").dehomogenize(2)
    assert chart2 == parse_polynomial("z - w^2", ("z", "w"))
    with pytest.raises(ValueError):
        homogenize(parse_polynomial("x^3"), 2)
    with pytest.raises(ValueError):
        parse_homogeneous("x0 - 1")


def test_charts_cover_every_point():
    F = parse_homogeneous("x0*x2 - x1^2")
    for pt in [(1, 2, 4), (0, 0, 1), (0, 1, 0), (Fr(1, 2), 1, 2)]:
        chart = max(range(3), key=lambda k: abs(pt[k]))
        f = F.dehomogenize(chart)
        rest = [Fr(pt[k]) / pt[chart] for k in range(3) if k != chart]
        assert f(*rest) == F(*[Fr(v) for v in pt]) / Fr(pt[chart]) ** 2


def test_exact_evaluation():
    p = parse_polynomial("x^2/4 + y^2 - 1")
    assert p(Fr(1, 3), Fr(2, 5)) == Fr(1, 36) + Fr(4, 25) - 1


# -- Hessians ---------------------------------------------------------------


@pytest.mark.parametrize(
    "text, expected",
    [("x^2 + y^2 - 1", "8*x^2 + 8*y^2"), ("y - x^2", "-2"), ("3*x - 5*y + 7", "0")],
)
def test_skew_hessian_examples(text, expected):
    assert skew_hessian(parse_polynomial(text)) == parse_polynomial(expected)


@given(sparse_terms)
def test_skew_hessian_matches_sympy(terms):
    p = BivariatePolynomial(terms)
    f = to_sympy(p)
    fx, fy = sympy.diff(f, X), sympy.diff(f, Y)
    oracle = sympy.expand(sympy.diff(f, X, 2) * fy**2 - 2 * sympy.diff(f, X, Y) * fx * fy + sympy.diff(f, Y, 2) * fx**2)
    assert sympy.expand(to_sympy(skew_hessian(p)) - oracle) == 0


small_q = st.fractions(min_value=-9, max_value=9, max_denominator=6)


@given(small_q, small_q, small_q)
def test_skew_hessian_of_lines_vanishes(a, b, c):
    assert skew_hessian(BivariatePolynomial({(1, 0): a, (0, 1): b, (0, 0): c})).is_zero()


@pytest.mark.parametrize(
    "text, expected",
    [
        ("x0^3 + x1^3 + x2^3", "216*x0*x1*x2"),
        ("x0*x1*x2", "2*x0*x1*x2"),
        ("x1*x2 - x0^2", "2"),
    ],
)
def test_projective_hessian_examples(text, expected):
    H = projective_hessian(parse_homogeneous(text))
    assert dict(H.terms) == dict(parse_homogeneous(expected).terms)
    assert H.degree == 3 * (parse_homogeneous(text).degree - 2)


def test_projective_hessian_of_line_pair_is_zero():
    H = projective_hessian(parse_homogeneous("x1^2 - x2^2"))
    assert H.is_zero() and str(H) == "0"


def test_projective_hessian_against_sympy():
    x0, x1, x2 = sympy.symbols("x0 x1 x2")
    for text in ["x0*x2^2 - x1^3 - x0^2*x1", "x0^4 + x1^4 + x2^4", "x0^2*x2^2 - x1^4 - x2^4"]:
        F = parse_homogeneous(text)
        f = sympy.sympify(text.replace("^", "**"))
        oracle = sympy.expand(sympy.hessian(f, (x0, x1, x2)).det())
        got = sympy.expand(sympy.sympify(str(projective_hessian(F)).replace("^", "**")))
        assert sympy.expand(got - oracle) == 0


@given(sparse_terms, st.integers(0, 3))
def test_tangent_direction_kills_first_order(terms, seed):
    p = BivariatePolynomial(terms) + parse_polynomial("x^2 + y^2 - 1")
    # a rational point on the unit circle, then shift the constant so the curve passes there
    rng = np.random.default_rng(seed)
    t = Fr(int(rng.integers(-5, 6)), 7)
    P = (Fr(1) - t * t) / (1 + t * t), 2 * t / (1 + t * t)
    p = p - p(*P)
    gx, gy = p.diff(0)(*P), p.diff(1)(*P)
    coeffs = taylor_coefficients(p, P)
    # derivative of p(P + e*(gy, -gx)) at e = 0
    first = coeffs.get((1, 0), 0) * gy - coeffs.get((0, 1), 0) * gx
    assert first == 0


# -- roots -----------------------------------------------------------------


def _multiset(rm):
    return sorted((round(z.real, 8), round(z.imag, 8), m) for z, m in rm.roots)


@pytest.mark.parametrize(
    "coeffs, expected",
    [
        ([1, -2, 1], [(1.0, 0.0, 2)]),
        ([Fr(3, 4), -2, 1], [(0.5, 0.0, 1), (1.5, 0.0, 1)]),
        ([2, -3, 0, 1], [(-2.0, 0.0, 1), (1.0, 0.0, 2)]),
        ([0, 0, 1], [(0.0, 0.0, 2)]),
    ],
)
def test_roots_examples(coeffs, expected):
    assert _multiset(roots(coeffs)) == expected


@given(
    st.lists(
        st.tuples(st.integers(-4, 4), st.integers(-4, 4), st.integers(1, 4)),
        min_size=1,
        max_size=4,
        unique_by=lambda t: (t[0], t[1]),
    )
)
def test_roots_recover_known_factorisations(factors):
    # roots (a + b i)/2 with integer multiplicities, exact Gaussian-rational coefficients
    z = sympy.Symbol("z")
    expr = sympy.Integer(1)
    for a, b, m in factors:
        expr *= (z - (sympy.Rational(a, 2) + sympy.I * sympy.Rational(b, 2))) ** m
    poly = sympy.Poly(sympy.expand(expr), z)
    coeffs = []
    for c in reversed(poly.all_coeffs()):
        re, im = sympy.re(c), sympy.im(c)
        if im == 0:
            coeffs.append(Fr(int(re.p), int(re.q)))
        else:
            coeffs.append(complex(float(re), float(im)))
    rm = roots(coeffs)
    key = lambda zm: (round(zm[0].real, 6), round(zm[0].imag, 6))
    got = sorted(rm.roots, key=key)
    want = sorted(((complex(a / 2, b / 2), m) for a, b, m in factors), key=key)
    assert len(got) == len(want)
    for (zg, mg), (zw, mw) in zip(got, want):
        assert mg == mw
        assert abs(zg - zw) < 1e-8
    assert rm.degree == poly.degree()


def test_roots_cluster_radius_merges_close_pair():
    # (z - 1)(z - 1 - 1e-8): one double root at the default radius, two roots at a tiny one
    pair = [Fr(10**8 + 1, 10**8), -Fr(2 * 10**8 + 1, 10**8), 1]
    assert [m for _, m in roots(pair).roots] == [2]
    assert sorted(m for _, m in roots(pair, cluster_radius=1e-10).roots) == [1, 1]


def test_roots_rejects_constant():
    with pytest.raises(ValueError):
        roots([3])


def test_root_failure_reports_residual():
    err = RootFindingError("no", 1e-3)
    assert err.best_residual == 1e-3 and "1.000e-03" in str(err)


def test_univariate_trims_leading_zeros():
    p = UnivariateComplexPolynomial([1, 2, 0, 0])
    assert p.degree == 1
    with pytest.raises(ValueError):
        UnivariateComplexPolynomial([0, 0])


def test_homogeneous_transform_matches_substitution():
    F = parse_homogeneous("x0*x2 - x1^2")
    M = [[1, 0, 0], [1, 1, 0], [0, 2, 1]]
    G = F.transform(M)
    for pt in [(1, 2, 3), (Fr(1, 2), -1, 4)]:
        img = [sum(Fr(M[i][j]) * pt[j] for j in range(3)) for i in range(3)]
        assert G(*[Fr(v) for v in pt]) == F(*img)
    assert isinstance(G, HomogeneousPolynomial) and G.degree == 2
