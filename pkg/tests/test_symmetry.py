import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from billiard_lab.polycore import parse_polynomial, skew_hessian
from billiard_lab.symmetry import (
    BranchingLocusError,
    LeafContext,
    SymmetryError,
    check_central_symmetry,
    circle_points,
    complex_points_near,
    epsilon3_vs_dHdV,
    epsilon_even_test,
    hF_constancy,
    symmetry_at,
    tangent_line_intersections,
    trace_real_curve,
    u_series,
)

P = parse_polynomial
CIRCLE = P("x^2 + y^2 - 1")
PARABOLA = P("y - x^2")
HYPERBOLA = P("x*y - 1")
CUBIC = P("y - x^3 - x*y - y^3/2 + 1/3")
QUARTIC = P("x^4 + y^4 + x^2*y - 1")
R3 = math.sqrt(3)


def ring_pair(R):
    return CIRCLE * (P("x^2 + y^2") - Fraction(R) ** 2)


def _as_list(ms):
    return sorted(((round(z.real, 12), round(z.imag, 12)), m) for z, m in ms.roots)


# -- tangent-line sections ----------------------------------------------------------------


def test_circle_pair_section():
    ms = tangent_line_intersections(CIRCLE, ring_pair(2), (1, 0))
    assert _as_list(ms) == [((round(-R3, 12), 0.0), 1), ((0.0, 0.0), 2), ((round(R3, 12), 0.0), 1)]


@pytest.mark.parametrize("curve, t", [(PARABOLA, (0, 0)), (HYPERBOLA, (1, 1)), (CIRCLE, (0.6, 0.8))])
def test_conic_meets_its_tangent_doubly(curve, t):
    ms = tangent_line_intersections(curve, curve, t)
    assert len(ms.roots) == 1
    z, m = ms.roots[0]
    assert m == 2 and abs(z) < 1e-9


def test_section_errors():
    with pytest.raises(SymmetryError):
        tangent_line_intersections(CIRCLE, CIRCLE, (1, 1))
    node = P("y^2 - x^2*(x + 1)")
    with pytest.raises(SymmetryError):
        tangent_line_intersections(node, node, (0, 0))


# -- central symmetry reports --------------------------------------------------------------------


def test_symmetric_multiset():
    r = check_central_symmetry([0, 0, R3, -R3], 0)
    assert r.symmetric and r.defect == 0 and r.unmatched == 0


def test_asymmetric_multiset():
    r = check_central_symmetry([1, 2], 1)
    assert not r.symmetric
    assert r.unmatched == 1 and r.accounted == 2


def test_self_paired_center():
    r = check_central_symmetry([0.5, 1.5, 1.0], 1)
    assert r.symmetric and r.defect == 0
    assert (1 + 0j, 1 + 0j) in r.pairs
    assert r.self_paired == 1 and r.accounted == 3


def test_report_accounts_for_every_root():
    r = check_central_symmetry([0, 0, 1, -1, 5], 0)
    assert r.unmatched == 1 and r.self_paired == 0
    assert r.accounted == 5


# -- U(eps) evenness --------------------------------------------------------------------------------


def test_circle_u_is_even_and_exact():
    ctx = LeafContext(CIRCLE, P("1"))
    assert epsilon_even_test(ctx, (1, 0), 5) == [0, 0, 0]
    assert u_series(ctx, (1, 0), 4) == [0, 0, 4, 0, 0]


def test_generic_cubic_has_nonzero_eps3():
    ctx = LeafContext(P("y - x^3 - x*y - 1"), P("1"))
    c = u_series(ctx, (2, -9), 3)
    assert all(isinstance(v, (int, Fraction)) for v in c)
    assert c[1] == 0 and c[3] != 0


def test_linear_integral_has_flat_u():
    ctx = LeafContext(P("2*x - 3*y + 1"), P("1"))
    assert u_series(ctx, (1, 1), 5) == [0, 0, 0, 0, 0, 0]


def test_branching_locus_is_rejected():
    with pytest.raises(BranchingLocusError):
        epsilon_even_test(LeafContext(CIRCLE, P("x - 1"), 2), (1, 0))


def test_leaf_context_validation():
    with pytest.raises(SymmetryError):
        LeafContext(CIRCLE, P("0"))
    with pytest.raises(SymmetryError):
        LeafContext(CIRCLE, P("1"), m=2, integral=P("x^2 + y^2 - 1"))
    LeafContext(CIRCLE, P("x"), m=2, integral=P("x*(x^2 + y^2 - 1)^2"))


def test_multivalued_leaf_matches_single_valued_power():
    # f = (x^2 + y^2 - 1)^2 with g = 1, m = 2 is the square of the circle integral
    ctx = LeafContext(CIRCLE, P("1"), 2)
    assert max(epsilon_even_test(ctx, (0.6, 0.8), 5)) <= 1e-12


# -- H(F) along the curve ---------------------------------------------------------------------------


def test_h_of_circle_is_eight():
    rep = hF_constancy(LeafContext(CIRCLE, P("1")), circle_points(50))
    assert rep.mean == pytest.approx(8, abs=1e-12)
    assert rep.max_deviation <= 1e-10 and rep.identity_gap <= 1e-10


def test_h_of_parabola_is_minus_two():
    samples = [(x, x * x) for x in np.linspace(-3, 3, 25)]
    rep = hF_constancy(LeafContext(PARABOLA, P("1")), samples)
    assert rep.mean == pytest.approx(-2, abs=1e-12)
    assert rep.max_deviation <= 1e-10


def test_h_of_generic_quartic_varies():
    a = (1.0, 0.0)
    b = (0.0, 1.0)
    assert QUARTIC(*a) == 0 and QUARTIC(*b) == 0
    H = skew_hessian(QUARTIC)
    assert abs(H(*a) - H(*b)) > 1e-2
    rep = hF_constancy(LeafContext(QUARTIC, P("1")), [a, b])
    assert rep.max_deviation > 1e-2


def test_h_empty_samples():
    with pytest.raises(SymmetryError):
        hF_constancy(LeafContext(CIRCLE, P("1")), [])


def test_leaf_identity_for_nontrivial_g():
    # g^(3/m) H(psi) on one leaf against the chain rule applied to F = g^(1/m) psi
    ctx = LeafContext(CIRCLE, P("x + 3"), 2)
    rep = hF_constancy(ctx, circle_points(20))
    assert rep.identity_gap <= 1e-10


# -- eps^3 against dH/dV ----------------------------------------------------------------------------


@pytest.mark.parametrize("ctx, point", [(LeafContext(CIRCLE, P("1")), (1, 0)), (LeafContext(PARABOLA, P("1")), (2, 4))])
def test_eps3_and_dhdv_vanish_on_conics(ctx, point):
    rep = epsilon3_vs_dHdV(ctx, point)
    assert rep.status == "both vanish" and rep.ratio is None


def test_eps3_ratio_is_constant_on_generic_cubic():
    ctx = LeafContext(CUBIC, P("1"))
    pts = trace_real_curve(CUBIC, (0.5, 0.3), 12, 0.1)
    ratios = [epsilon3_vs_dHdV(ctx, p).ratio for p in (pts[0], pts[11])]
    assert all(r is not None for r in ratios)
    assert abs(ratios[0] - ratios[1]) <= 1e-6


def test_eps3_ratio_on_multivalued_leaf():
    ctx = LeafContext(CIRCLE, P("x + 3"), 2)
    r1 = epsilon3_vs_dHdV(ctx, (0.6, 0.8)).ratio
    r2 = epsilon3_vs_dHdV(ctx, (-0.8, 0.6)).ratio
    assert abs(r1 - r2) <= 1e-6


# -- properties ---------------------------------------------------------------------------------------------


angles = st.floats(0, 2 * math.pi)


@given(st.sampled_from([CIRCLE, PARABOLA, HYPERBOLA, P("x^2/4 + y^2 - 1")]), st.floats(-2, 2))
def test_conic_sections_are_double_zero(conic, s):
    pts = {
        CIRCLE: (math.cos(s), math.sin(s)),
        PARABOLA: (s, s * s),
        HYPERBOLA: (math.exp(s), math.exp(-s)),
    }
    t = pts.get(conic, (2 * math.cos(s), math.sin(s)))
    r = symmetry_at(conic, conic, t)
    assert r.symmetric and r.defect <= 1e-7
    assert len(r.roots) == 2


@given(angles, st.floats(1.05, 8))
def test_circle_pair_symmetric_for_every_radius(s, R):
    r = symmetry_at(CIRCLE, ring_pair(R), (math.cos(s), math.sin(s)))
    assert r.symmetric and r.defect <= 1e-8


@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False), max_size=6), st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False))
def test_reflected_multiset_gives_same_verdict(values, center):
    r = check_central_symmetry(values, center)
    mirrored = check_central_symmetry([2 * center - z for z in values], center)
    assert r.symmetric == mirrored.symmetric
    assert r.accounted == mirrored.accounted == len(values)


@settings(max_examples=30)
@given(angles, st.floats(1.5, 5), st.integers(0, 2**31))
def test_circle_pair_symmetric_at_complex_points(s, R, seed):
    rng = np.random.default_rng(seed)
    for t in complex_points_near(CIRCLE, (math.cos(s), math.sin(s)), 2, 0.5, rng):
        r = symmetry_at(CIRCLE, ring_pair(R), t)
        assert r.symmetric


@given(angles)
def test_conic_integrals_give_even_u(s):
    for psi, t in [(CIRCLE, (math.cos(s), math.sin(s))), (P("x^2/4 + y^2 - 1"), (2 * math.cos(s), math.sin(s)))]:
        assert max(epsilon_even_test(LeafContext(psi, P("1")), t, 5)) <= 1e-10


@given(angles)
def test_h_constant_on_ellipse(s):
    psi = P("x^2/9 + y^2 - 1")
    pts = [(3 * math.cos(s + k), math.sin(s + k)) for k in range(6)]
    assert hF_constancy(LeafContext(psi, P("1")), pts).max_deviation <= 1e-8
