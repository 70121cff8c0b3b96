"""Print the ratio scan as CSV and a one-line summary of which ratios give a symmetric multiset."""

import argparse
import csv
import sys
from fractions import Fraction

from billiard_lab.theorems.audit import LemmaScan, lemma_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rs", default="4/3,3/2,2,5/2,3,7/2,4")
    ap.add_argument("--max-p", type=int, default=12)
    args = ap.parse_args()
    scan = lemma_scan([Fraction(r) for r in args.rs.split(",")], max_p=args.max_p)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(LemmaScan.CSV_HEADER)
    out.writerows(row.csv_row() for row in scan.rows)
    print(f"symmetric at r = {', '.join(str(r) for r in scan.symmetric_ratios) or 'none'}", file=sys.stderr)


if __name__ == "__main__":
    main()
