"""One test per acceptance criterion; each prints a PASS/FAIL line with the measured numbers."""

import contextlib
import io
import json
import math
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from billiard_lab import billiard as bl
from billiard_lab.cli import main
from billiard_lab.corpus import load_corpus
from billiard_lab.invariants import analyze_curve
from billiard_lab.polycore import parse_homogeneous, parse_polynomial
from billiard_lab.puiseux import branches_at_infinity, classify_subquadratic, puiseux_branches
from billiard_lab.symmetry import LeafContext, circle_points, epsilon_even_test, hF_constancy, symmetry_at, trace_real_curve, u_series
from billiard_lab.theorems.asymptotics import PlaneGerm, verify_tangent_asymptotics
from billiard_lab.theorems.audit import lemma_scan, power_sum_residual, random_triples
from billiard_lab.theorems.certify import CONIC_CONSISTENT, COUNTEREXAMPLE_FLAG, HYPOTHESIS_VIOLATED, certify_conic, certify_in_frames

from .conftest import ACCEPTANCE_LINES

P = parse_polynomial
GOLDEN = Path(__file__).parent / "golden"


def record(n, title, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {title} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_01_elliptic_invariance():
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    worst = {}
    for a, b in [(1, 1), (2, 1), (3, 0.5)]:
        curve = bl.ParametricConvexCurve.ellipse(a, b)
        f = P(f"x^2/{a * a} + y^2*{Fraction(1 / (b * b))}")
        worst[(a, b)] = max(bl.sweep(curve, f, bl.random_outside_points(curve, 1000, rng)))
    elapsed = time.perf_counter() - start
    ok = max(worst.values()) <= 1e-8 and elapsed < 10
    record(1, "elliptic invariance", ok, f"max residual {max(worst.values()):.2e} over 3x1000 points, {elapsed:.1f} s")


def test_criterion_02_area_preservation():
    rng = np.random.default_rng(99)
    dev = 0.0
    for curve in (bl.ParametricConvexCurve.circle(), bl.ParametricConvexCurve.ellipse(2, 1)):
        for A in bl.random_outside_points(curve, 100, rng, scale=(1.2, 4.0)):
            dev = max(dev, abs(bl.jacobian_determinant(curve, A, 1e-5) - 1))
    record(2, "area preservation", dev <= 1e-5, f"max |det - 1| = {dev:.2e} over 200 points")


def test_criterion_03_hessian_constancy():
    circle = hF_constancy(LeafContext(P("x^2 + y^2 - 1"), P("1")), circle_points(50))
    parabola = hF_constancy(LeafContext(P("y - x^2"), P("1")), [(x, x * x) for x in np.linspace(-3, 3, 50)])
    quartic = P("x^4 + y^4 + x^2*y - 1")
    generic = hF_constancy(LeafContext(quartic, P("1")), trace_real_curve(quartic, (1.0, 0.0), 30, 0.1))
    ok = (
        abs(circle.mean - 8) <= 1e-10
        and circle.max_deviation <= 1e-10
        and abs(parabola.mean + 2) <= 1e-10
        and parabola.max_deviation <= 1e-10
        and generic.max_deviation > 1e-2
    )
    record(3, "H(F) constancy", ok, f"circle {circle.mean.real:.12f} dev {circle.max_deviation:.1e}; parabola {parabola.mean.real:.12f} dev {parabola.max_deviation:.1e}; quartic dev {generic.max_deviation:.3f}")


def test_criterion_04_epsilon_evenness():
    cases = [
        (P("x^2 + y^2 - 1"), [(math.cos(s), math.sin(s)) for s in np.linspace(0, 6, 7)]),
        (P("x^2/4 + y^2 - 1"), [(2 * math.cos(s), math.sin(s)) for s in np.linspace(0.3, 6, 7)]),
        (P("x*y - 1"), [(x, 1 / x) for x in (0.25, 0.5, 2.0, 3.0, -1.0, -4.0)]),
    ]
    worst, n = 0.0, 0
    for psi, pts in cases:
        for p in pts:
            worst = max(worst, max(epsilon_even_test(LeafContext(psi, P("1")), p, 5)))
            n += 1
    cubic = LeafContext(P("y - x^3 - x*y - 1"), P("1"))
    eps3 = u_series(cubic, (2, -9), 3)[3]
    ok = n == 20 and worst <= 1e-10 and eps3 != 0
    record(4, "epsilon evenness", ok, f"max odd coefficient {worst:.1e} at {n} points; cubic eps^3 coefficient {eps3}")


def test_criterion_05_circle_pair_symmetry():
    psi = P("x^2 + y^2 - 1")
    worst, bad = 0.0, 0
    for R in (2, 3, 5):
        gamma = psi * (P("x^2 + y^2") - R * R)
        for t in circle_points(50):
            r = symmetry_at(psi, gamma, t)
            worst = max(worst, r.defect)
            bad += not r.symmetric
    record(5, "circle-pair symmetry", worst <= 1e-8 and bad == 0, f"max defect {worst:.1e}, asymmetric {bad} of 150")


def test_criterion_06_puiseux_exactness():
    checks = []
    (cusp,) = puiseux_branches(P("y^2 - x^3"), (0, 0))
    checks.append((cusp.q, cusp.p) == (2, 3) and abs(cusp.c - 1) <= 1e-8)
    node = puiseux_branches(P("y^2 - x^2*(1 + x)"), (0, 0))
    cs = sorted(b.c.real for b in node)
    want = [-1 / (4 * math.sqrt(2)), 1 / (4 * math.sqrt(2))]
    checks.append(sorted((b.q, b.p) for b in node) == [(1, 2), (1, 2)] and max(abs(a - b) for a, b in zip(cs, want)) <= 1e-8)
    hyp = branches_at_infinity(parse_homogeneous("x1*x2 - x0^2"))
    checks.append(len(hyp) == 2 and all(b.transverse_to_infinity and classify_subquadratic(b)[0] and abs(b.c - 1) <= 1e-8 for b in hyp))
    (cub,) = branches_at_infinity(parse_homogeneous("x0^2*x2 - x1^3"))
    checks.append(not cub.transverse_to_infinity and (cub.q, cub.p) == (2, 3) and abs(cub.c - 1) <= 1e-8)
    record(6, "Puiseux exactness", all(checks), f"cusp/node/hyperbola/cubic checks {checks}")


def test_criterion_07_invariant_identities():
    curves = [
        ("x^2 + y^2 - 1", 0),
        ("y^2 - x^2*(x + 1)", 0),
        ("y^2 - x^3", 0),
        ("y^2 - x^4 + x^5", None),
        ("y^2 - x^4 - y^4", None),
        ("x^4 + y^4 - 1", 3),
    ]
    start = time.perf_counter()
    ok, details = True, []
    for text, g in curves:
        r = analyze_curve(P(text))
        parity = all((p.kappa - sum(s - 1 for s, _ in p.branches)) % 2 == 0 for p in r.points)
        hess = all(p.hessian_h == 3 * p.kappa + sum(ss - s for s, ss in p.branches) for p in r.points)
        good = parity and hess and r.pluecker_residual == 0 and (g is None or r.genus == g)
        ok &= good
        details.append(f"{text}: genus {r.genus}")
    elapsed = time.perf_counter() - start
    record(7, "invariant identities", ok and elapsed < 60, "; ".join(details) + f"; {elapsed:.1f} s")


def test_criterion_08_root_power_sums():
    rng = np.random.default_rng(8)
    worst = max(power_sum_residual(t) for t in random_triples(100, rng, 40))
    record(8, "root-power sum", worst <= 1e-8, f"max residual {worst:.1e} over 100 triples, p <= 40")


def test_criterion_09_lemma_scan():
    scan = lemma_scan([Fraction(4, 3), Fraction(3, 2), 2, Fraction(5, 2), 3])
    at_two = [abs(r.identity_residual) for r in scan.rows if r.r == 2]
    off = [abs(r.identity_residual) for r in scan.rows if r.r != 2]
    ok = scan.symmetric_ratios == [2] and all(r.m_symmetric for r in scan.column(2)) and max(at_two) <= 1e-8 and min(off) >= 0.1
    record(9, "lemma scan", ok, f"symmetric columns {[str(r) for r in scan.symmetric_ratios]}; identity residual <= {max(at_two):.1e} at r=2, >= {min(off):.2f} elsewhere")


def test_criterion_10_asymptotics():
    b = PlaneGerm.branch(2, [(3, 1)])
    (zf,) = verify_tangent_asymptotics(b, PlaneGerm.axis("z")).local_families()
    (wf,) = verify_tangent_asymptotics(b, PlaneGerm.axis("w")).local_families()
    e = wf.errors[-3:]
    ok = all(f == Fraction(1, 3) for f in zf.factors) and abs(complex(wf.factors[-1]) + 0.5) <= 1e-12 and e[0] >= e[1] >= e[2]
    record(10, "tangent asymptotics", ok, f"z-factor {zf.factors[-1]} at every t; w-factor {wf.factors[-1]}, last errors {e}")


def test_criterion_11_conic_certification():
    verdicts = []
    for text, seed in (("x1*x2 - x0^2", 1), ("x0*x2 - x1^2", 2)):
        verdicts += [c.verdict for c in certify_in_frames(parse_homogeneous(text), 10, seed)]
    singular = [certify_conic(P(t)).verdict for t in ("y^2 - x^2*(x + 1)", "y^2 - x^3")]
    corpus = [certify_conic(P(c["equation"])).verdict for c in load_corpus()]
    flags = corpus.count(COUNTEREXAMPLE_FLAG) + verdicts.count(COUNTEREXAMPLE_FLAG)
    ok = verdicts == [CONIC_CONSISTENT] * 20 and singular == [HYPOTHESIS_VIOLATED] * 2 and flags == 0
    record(11, "conic certification", ok, f"{verdicts.count(CONIC_CONSISTENT)}/20 frames conic-consistent; singular cubics {singular}; flags {flags}")


def test_criterion_12_determinism():
    cases = json.loads((GOLDEN / "cases.json").read_text())
    same = 0
    for name, case in cases.items():
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            main(case["argv"])
        same += buf.getvalue() == (GOLDEN / f"{name}.json").read_text()
    record(12, "golden determinism", same == len(cases), f"{same}/{len(cases)} golden files byte-identical")
