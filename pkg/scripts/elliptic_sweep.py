"""Max invariance residual and area-preservation error of the outer billiard map on a family of ellipses."""

import argparse
import time
from fractions import Fraction

import numpy as np

from billiard_lab import billiard as bl
from billiard_lab.polycore import parse_polynomial


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--axes", default="1:1,2:1,3:0.5,5:1,1.5:1.2")
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print("a,b,points,max_residual,max_jacobian_error,seconds")
    for pair in args.axes.split(","):
        a, b = (float(v) for v in pair.split(":"))
        curve = bl.ParametricConvexCurve.ellipse(a, b)
        f = parse_polynomial(f"x^2*{Fraction(1 / (a * a)).limit_denominator(10**6)} + y^2*{Fraction(1 / (b * b)).limit_denominator(10**6)}")
        start = time.perf_counter()
        pts = bl.random_outside_points(curve, args.n, rng)
        res = max(bl.sweep(curve, f, pts))
        jac = max(abs(bl.jacobian_determinant(curve, A) - 1) for A in pts[:50])
        print(f"{a},{b},{args.n},{res:.3e},{jac:.3e},{time.perf_counter() - start:.2f}")


if __name__ == "__main__":
    main()
