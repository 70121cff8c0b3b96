"""Tabulate degree, genus, singular and inflection data for every curve in the bundled corpus."""

import time

from billiard_lab.corpus import load_corpus
from billiard_lab.invariants import analyze_curve
from billiard_lab.polycore import parse_polynomial
from billiard_lab.theorems.certify import certify_conic


def main():
    print("name,degree,genus,expected_genus,delta_total,hessian_total,pluecker_residual,consistent,certify,seconds")
    for entry in load_corpus():
        start = time.perf_counter()
        f = parse_polynomial(entry["equation"])
        r = analyze_curve(f)
        verdict = certify_conic(f).verdict
        print(
            f"{entry['name']},{r.degree},{r.genus},{entry['genus']},{r.delta_total},{r.hessian_total},"
            f"{r.pluecker_residual},{r.consistent},{verdict},{time.perf_counter() - start:.2f}"
        )


if __name__ == "__main__":
    main()
