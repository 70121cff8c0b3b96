import math
from fractions import Fraction as Fr

import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from billiard_lab.polycore import HomogeneousPolynomial, homogenize, parse_homogeneous, parse_polynomial
from billiard_lab.puiseux import (
    NonReducedError,
    NotOnCurveError,
    PuiseuxError,
    branches_at_infinity,
    classify_exponents,
    classify_subquadratic,
    infinity_points,
    newton_polygon,
    puiseux_branches,
)

P = parse_polynomial


def exps(branches):
    return sorted((b.q, b.p) for b in branches)


# -- Newton polygon ------------------------------------------------------------


def test_polygon_single_edge():
    (edge,) = newton_polygon(P("y^2 - x^3"))
    assert (edge.start, edge.end) == ((3, 0), (0, 2))
    assert edge.exponent_ratio == Fr(3, 2)


def test_polygon_node_ignores_point_above_hull():
    (edge,) = newton_polygon(P("y^2 - x^2*(1+x)"))
    assert (edge.start, edge.end) == ((2, 0), (0, 2))
    assert all(m[0] != (3, 0) for m in edge.monomials)


def test_polygon_two_edges():
    # support {(3,0), (1,1), (0,3)}: a germ meeting two branches of different contact
    edges = newton_polygon(P("x^3 + x*y + y^3"))
    assert [(e.start, e.end) for e in edges] == [((3, 0), (1, 1)), ((1, 1), (0, 3))]
    assert edges[0].slope > edges[1].slope
    assert [e.exponent_ratio for e in edges] == [2, Fr(1, 2)]


def test_polygon_collinear_support_is_one_edge():
    # {(3,0), (1,2), (0,3)} lies on i + j = 3
    edges = newton_polygon(P("x^3 + x*y^2 + y^3"))
    assert len(edges) == 1
    assert len(edges[0].monomials) == 3


def test_polygon_requires_vanishing_at_origin():
    with pytest.raises(NotOnCurveError):
        newton_polygon(P("y - x^2 + 1"))


@given(st.dictionaries(st.tuples(st.integers(0, 6), st.integers(0, 6)), st.integers(-4, 4).filter(bool), min_size=1, max_size=8))
def test_polygon_edges_form_lower_hull(terms):
    terms.pop((0, 0), None)
    assume(terms)
    edges = newton_polygon(terms)
    for a, b in zip(edges, edges[1:]):
        assert a.end == b.start
        assert a.slope > b.slope
    for e in edges:
        (i0, j0), (i1, j1) = e.start, e.end
        for i, j in terms:
            # no support point strictly below the supporting line of an edge
            assert (i1 - i0) * (j - j0) - (j1 - j0) * (i - i0) <= 0


# -- local branches -------------------------------------------------------------


def test_cusp():
    (b,) = puiseux_branches(P("y^2 - x^3"), (0, 0))
    assert (b.q, b.p) == (2, 3)
    assert b.r == Fr(3, 2)
    assert abs(b.c - 1) < 1e-12
    assert b.exact


def test_node_two_aligned_quadratic_branches():
    bs = puiseux_branches(P("y^2 - x^2*(1+x)"), (0, 0))
    assert exps(bs) == [(1, 2), (1, 2)]
    s = 1 / math.sqrt(2)
    tangents = sorted((round(b.tangent[0].real, 12), round(b.tangent[1].real, 12)) for b in bs)
    assert tangents == [(round(s, 12), round(-s, 12)), (round(s, 12), round(s, 12))]
    # y = x sqrt(1+x) written in its tangent frame: v = u^2 / (4 sqrt 2) + ...
    cs = sorted(b.c.real for b in bs)
    assert cs == pytest.approx([-1 / (4 * math.sqrt(2)), 1 / (4 * math.sqrt(2))], abs=1e-12)
    for b in bs:
        assert b.r == 2


def test_graph_branch():
    (b,) = puiseux_branches(P("y - x^2"), (0, 0))
    assert (b.q, b.p, b.c) == (1, 2, 1)
    assert b.exact


def test_tail_of_a_smooth_branch():
    (b,) = puiseux_branches(P("y - x^2 - x^3"), (0, 0))
    assert [(e, round(a.real, 12)) for e, a in b.series] == [(2, 1), (3, 1)]


def test_branch_with_two_puiseux_pairs_needs_second_stage():
    (b,) = puiseux_branches(P("(y - x^2)^2 - x^5"), (0, 0))
    assert (b.q, b.p) == (2, 4)
    assert [e for e, _ in b.series[:2]] == [2, Fr(5, 2)]


def test_line_germs():
    bs = puiseux_branches(P("x*y*(x - y)"), (0, 0))
    assert len(bs) == 3
    assert all(b.is_line and b.r == math.inf for b in bs)


def test_off_curve_point_rejected():
    with pytest.raises(NotOnCurveError):
        puiseux_branches(P("y - x^2"), (1, 0))


def test_non_reduced_detected():
    with pytest.raises(NonReducedError):
        puiseux_branches(P("(y - x^2)^2"), (0, 0))


@pytest.mark.parametrize(
    "text, point, mult",
    [
        ("y^2 - x^3", (0, 0), 2),
        ("y^2 - x^2*(1+x)", (0, 0), 2),
        ("y^2 - x^4 - y^4", (0, 0), 2),
        ("(y - x^2)^2 - x^5", (0, 0), 2),
        ("x*y*(x - y) + x^5", (0, 0), 3),
        ("(x^2 + y^2)^2 + 3*x^2*y - y^3", (0, 0), 3),
        ("y^3 - x^7", (0, 0), 3),
    ],
)
def test_branch_multiplicities_add_up_to_point_multiplicity(text, point, mult):
    bs = puiseux_branches(P(text), point)
    assert sum(b.q for b in bs) == mult


def _log_slope(f, b):
    with mpmath.workdps(100):
        vals = []
        for t in (mpmath.mpf("1e-2"), mpmath.mpf("1e-3")):
            x, y = b.point_at(t)
            vals.append(abs(f(x, y)))
        return float(mpmath.log10(vals[0] / vals[1]))


@pytest.mark.parametrize("text", ["y^2 - x^2*(1+x)", "y - x^2 - x^3 + x*y^2", "y^2 - x^4 - y^4", "y^3 - x^4 - x^5"])
def test_substitution_residual_has_truncation_order(text):
    f = P(text)
    for b in puiseux_branches(f, (0, 0)):
        if b.exact:
            continue
        assert _log_slope(f, b) >= b.order - 0.2


def test_explicit_order_is_respected():
    (b,) = puiseux_branches(P("y - x^2 - x^3 + x*y^2"), (0, 0), order=20)
    assert b.order == 20
    assert max(e for e, _ in b.series) <= 20
    assert _log_slope(P("y - x^2 - x^3 + x*y^2"), b) >= 20 - 0.2


def test_conjugates_reported_once_with_smallest_argument():
    (b,) = puiseux_branches(P("y^3 + x^4"), (0, 0))
    assert (b.q, b.p) == (3, 4)
    # every cube-root choice of the parameter gives c * w^4 with w^3 = 1; the
    # representative has the smallest nonnegative argument
    assert 0 <= mpmath.arg(b.c) % (2 * math.pi) < 2 * math.pi / 3 + 1e-9


# -- infinity --------------------------------------------------------------------------


def test_hyperbola_at_infinity():
    bs = branches_at_infinity(parse_homogeneous("x1*x2 - x0^2"))
    assert len(bs) == 2
    pts = sorted(tuple(round(abs(z)) for z in b.homogeneous_point) for b in bs)
    assert pts == [(0, 0, 1), (0, 1, 0)]
    for b in bs:
        assert b.transverse_to_infinity
        assert (b.q, b.p) == (1, 2)
        assert classify_subquadratic(b) == (True, True)
        assert abs(b.c - 1) < 1e-8


def test_parabola_at_infinity():
    (b,) = branches_at_infinity(parse_homogeneous("x0*x2 - x1^2"))
    assert not b.transverse_to_infinity
    assert (b.q, b.p) == (1, 2)
    assert (b.s, b.s_star) == (1, 1)
    assert b.infinity_contact() == 2


def test_cubic_graph_at_infinity():
    (b,) = branches_at_infinity(parse_homogeneous("x0^2*x2 - x1^3"))
    assert not b.transverse_to_infinity
    assert (b.q, b.p) == (2, 3)
    assert b.r == Fr(3, 2)
    assert abs(b.c - 1) < 1e-8


def test_fermat_quartic_at_infinity():
    bs = branches_at_infinity(parse_homogeneous("x0^4 + x1^4 + x2^4"))
    assert len(bs) == 4
    assert all(b.transverse_to_infinity and (b.q, b.p) == (1, 4) for b in bs)


def test_infinity_points_of_circle_are_isotropic():
    pts = infinity_points(homogenize(P("x^2 + y^2 - 1"), 2))
    assert len(pts) == 2
    for _chart, _pt, hom, mult in pts:
        assert mult == 1
        assert abs(complex(hom[1]) ** 2 + complex(hom[2]) ** 2) < 1e-30


@given(st.integers(2, 4), st.lists(st.integers(-3, 3), min_size=15, max_size=15))
def test_contacts_at_infinity_add_up_to_degree(d, cs):
    terms = {}
    k = 0
    for i in range(d + 1):
        for j in range(d + 1 - i):
            if cs[k]:
                terms[(i, j, d - i - j)] = cs[k]
            k += 1
    assume(terms)
    F = HomogeneousPolynomial(terms, degree=d)
    assume(any(F.binary_form_at_infinity()))
    try:
        bs = branches_at_infinity(F)
    except PuiseuxError:
        assume(False)
    assume(all(not b.is_line or b.transverse_to_infinity for b in bs))
    assert sum(b.infinity_contact() for b in bs) == d


# -- chart independence -------------------------------------------------------------


def _at_point_in_chart(F, hom, chart):
    k = [i for i in range(3) if i != chart]
    pt = (Fr(hom[k[0]], hom[chart]), Fr(hom[k[1]], hom[chart]))
    return exps(puiseux_branches(F.dehomogenize(chart), pt))


@pytest.mark.parametrize(
    "text",
    ["(y - 1)^2 - (x - 1)^3", "(y - 1)^2 - (x - 1)^2*x", "(y - 1)^3 - (x - 1)^4 + (x - 1)^5", "y - 1 - (x - 1)^3"],
)
def test_exponents_are_chart_independent(text):
    F = homogenize(P(text), P(text).degree)
    data = [_at_point_in_chart(F, (1, 1, 1), chart) for chart in range(3)]
    assert data[0] == data[1] == data[2]


def test_infinity_point_seen_from_two_charts():
    F = parse_homogeneous("x1*x2 + x1^2 - x0^2")
    # (0:1:-1) lies in both charts 1 and 2
    assert _at_point_in_chart(F, (0, 1, -1), 1) == _at_point_in_chart(F, (0, 1, -1), 2) == [(1, 2)]


# -- exponent classes ------------------------------------------------------------------


@pytest.mark.parametrize("q, p, expected", [(1, 2, (True, True)), (2, 3, (False, True)), (1, 3, (False, False))])
def test_classify(q, p, expected):
    assert classify_exponents(q, p) == expected


def test_classify_rejects_line_germ():
    (b, *_) = puiseux_branches(P("x*y"), (0, 0))
    with pytest.raises(PuiseuxError):
        classify_subquadratic(b)
