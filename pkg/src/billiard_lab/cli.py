"""Command line entry point: one subcommand per pipeline, JSON reports on stdout.

Exit codes: 0 when the check passes, 2 for a negative mathematical verdict
(the report is still written), 1 for operational errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from . import billiard as bl
from .corpus import load_corpus
from .invariants import analyze_curve
from .polycore import HomogeneousPolynomial, homogenize, parse_homogeneous, parse_polynomial
from .puiseux import branches_at_infinity, puiseux_branches
from .symmetry import (
    LeafContext,
    complex_points_near,
    epsilon3_vs_dHdV,
    epsilon_even_test,
    hF_constancy,
    symmetry_at,
    trace_real_curve,
)
from .theorems.asymptotics import PlaneGerm, verify_tangent_asymptotics
from .theorems.audit import GermTriple, audit_collection, lemma_scan
from .theorems.certify import CONIC_CONSISTENT, COUNTEREXAMPLE_FLAG, certify_conic, certify_in_frames

SCHEMA = "1"
OK, ERROR, NEGATIVE = 0, 1, 2


@dataclass
class RunConfig:
    """Everything a run depends on; every field has a default."""

    command: str = ""
    seed: int = 0
    root_tol: float = 1e-12
    symmetry_tol: float = 1e-7
    residual_tol: float = 1e-8
    out: str | None = None
    csv: str | None = None
    options: dict = field(default_factory=dict)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return _jsonable(float(obj))
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def render(payload: dict, config: RunConfig) -> str:
    doc = {"schema": SCHEMA, "command": config.command, "seed": config.seed, **payload}
    return json.dumps(_jsonable(doc), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# -- input helpers ----------------------------------------------------------------------------------


def _pair(text: str) -> tuple[float, float]:
    parts = [float(s) for s in text.split(",")]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'a,b', got {text!r}")
    return parts[0], parts[1]


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _read_text(value: str) -> str:
    """A literal, or the contents of a file when the value starts with '@'."""
    if value.startswith("@"):
        return Path(value[1:]).read_text()
    return value


def _convex_curve(opts: dict) -> bl.ParametricConvexCurve:
    if opts.get("curve_ellipse"):
        a, b = opts["curve_ellipse"]
        return bl.ParametricConvexCurve.ellipse(a, b)
    if opts.get("curve_bumpy"):
        eps, k = opts["curve_bumpy"]
        return bl.ParametricConvexCurve.perturbed_circle(eps, int(k))
    return bl.ParametricConvexCurve.circle(opts.get("curve_circle") or 1.0)


def _default_integral(opts: dict):
    if opts.get("integral"):
        return parse_polynomial(_read_text(opts["integral"]))
    if opts.get("curve_ellipse"):
        a, b = (Fraction(v).limit_denominator(10**6) for v in opts["curve_ellipse"])
        return parse_polynomial(f"x^2/({a * a}) + y^2/({b * b})")
    if not opts.get("curve_bumpy"):
        return parse_polynomial("x^2 + y^2")
    return None


def _plane_curve(opts: dict) -> HomogeneousPolynomial:
    if opts.get("projective"):
        return parse_homogeneous(_read_text(opts["projective"]))
    if not opts.get("curve"):
        raise ValueError("give --curve or --projective")
    f = parse_polynomial(_read_text(opts["curve"]))
    return homogenize(f, f.degree)


def _load_points(path: str) -> list:
    data = json.loads(Path(path).read_text())
    pts = []
    for p in data:
        pts.append(tuple(complex(*c) if isinstance(c, list) else c for c in p))
    return pts


# -- subcommands ------------------------------------------------------------------------------------


def cmd_orbit(cfg: RunConfig):
    o = cfg.options
    curve = _convex_curve(o)
    rec = bl.orbit(curve, o["start"], o["n"], integral=_default_integral(o))
    if cfg.csv:
        Path(cfg.csv).write_text(rec.to_csv())
    return {"curve": curve.to_dict(), "summary": rec.summary(), "points": [list(map(float, p)) for p in rec.points]}, OK


def cmd_invariance(cfg: RunConfig):
    o = cfg.options
    curve = _convex_curve(o)
    f = _default_integral(o)
    if f is None:
        raise ValueError("--integral is required for this curve")
    rng = np.random.default_rng(cfg.seed)
    pts = bl.random_outside_points(curve, o["n"], rng)
    res = bl.sweep(curve, f, pts)
    worst = max(res)
    ok = worst <= cfg.residual_tol
    return {"curve": curve.to_dict(), "integral": str(f), "n": len(res), "max_residual": worst, "mean_residual": float(np.mean(res)), "tolerance": cfg.residual_tol, "invariant": ok}, OK if ok else NEGATIVE


def cmd_jacobian(cfg: RunConfig):
    o = cfg.options
    curve = _convex_curve(o)
    rng = np.random.default_rng(cfg.seed)
    pts = bl.random_outside_points(curve, o["n"], rng, scale=(1.2, 4.0))
    dets = [bl.jacobian_determinant(curve, A, o["h"]) for A in pts]
    dev = max(abs(d - 1) for d in dets)
    ok = dev <= o["tol"]
    return {"curve": curve.to_dict(), "n": len(dets), "h": o["h"], "max_deviation": dev, "tolerance": o["tol"], "area_preserving": ok}, OK if ok else NEGATIVE


def _sample_points(psi, o, seed):
    if o.get("points") and o["points"] != "auto":
        return _load_points(o["points"])
    pts = trace_real_curve(psi, o["start"], o["n"], o["step"])
    if o.get("complex"):
        rng = np.random.default_rng(seed)
        extra = []
        for p in pts[: o["complex"]]:
            extra.extend(complex_points_near(psi, p, 1, 0.3, rng))
        pts = pts + extra
    return pts


def cmd_symmetry(cfg: RunConfig):
    o = cfg.options
    psi = parse_polynomial(_read_text(o["psi"]))
    gamma = parse_polynomial(_read_text(o["gamma"]))
    reports = [symmetry_at(psi, gamma, t, cfg.symmetry_tol) for t in _sample_points(psi, o, cfg.seed)]
    ok = all(r.symmetric for r in reports)
    return {"psi": str(psi), "gamma": str(gamma), "all_symmetric": ok, "reports": [r.to_dict() for r in reports]}, OK if ok else NEGATIVE


def cmd_evenness(cfg: RunConfig):
    o = cfg.options
    psi = parse_polynomial(_read_text(o["psi"]))
    ctx = LeafContext(psi, parse_polynomial(o["g"]), o["m"])
    pts = _sample_points(psi, o, cfg.seed)
    odd = [epsilon_even_test(ctx, P, o["order"]) for P in pts]
    worst = max(max(v) for v in odd)
    hf = hF_constancy(ctx, pts)
    e3 = [epsilon3_vs_dHdV(ctx, P).to_dict() for P in pts[:2]]
    even = worst <= o["tol"]
    return {
        "psi": str(psi),
        "g": o["g"],
        "m": o["m"],
        "n": len(pts),
        "max_odd_coefficient": worst,
        "even": even,
        "h_of_f": hf.to_dict(),
        "eps3_vs_dhdv": e3,
    }, OK if even else NEGATIVE


def cmd_puiseux(cfg: RunConfig):
    o = cfg.options
    if o.get("infinity"):
        F = _plane_curve(o)
        bs = branches_at_infinity(F, order=o["order"])
    else:
        f = parse_polynomial(_read_text(o["curve"]))
        pt = tuple(Fraction(v).limit_denominator(10**9) for v in o["point"])
        bs = puiseux_branches(f, pt, order=o["order"])
    return {"branches": [b.to_dict() for b in bs]}, OK


def cmd_invariants(cfg: RunConfig):
    o = cfg.options
    if o.get("corpus"):
        entries = load_corpus()
        if o["corpus"] != "all":
            entries = [e for e in entries if e["name"] == o["corpus"]]
            if not entries:
                raise ValueError(f"no corpus curve named {o['corpus']!r}")
        out, ok = [], True
        for e in entries:
            rep = analyze_curve(parse_polynomial(e["equation"]), cfg.seed)
            d = rep.to_dict()
            d["name"] = e["name"]
            d["expected_genus"] = e["genus"]
            good = rep.consistent and rep.pluecker_residual == 0 and rep.genus == e["genus"]
            ok &= good
            out.append(d)
        return {"curves": out, "all_consistent": ok}, OK if ok else NEGATIVE
    rep = analyze_curve(_plane_curve(o), cfg.seed)
    ok = rep.consistent and rep.pluecker_residual == 0 and rep.genus >= 0
    return {"report": rep.to_dict(), "all_consistent": ok}, OK if ok else NEGATIVE


def cmd_pluecker(cfg: RunConfig):
    rep = analyze_curve(_plane_curve(cfg.options), cfg.seed)
    d = rep.degree
    ok = rep.pluecker_residual == 0
    return {
        "equation": rep.equation,
        "degree": d,
        "hessian_degree_count": 3 * d * (d - 2),
        "hessian_total": rep.hessian_total,
        "residual": rep.pluecker_residual,
        "genus": rep.genus,
        "points": [p.to_dict() for p in rep.notable_points()],
    }, OK if ok else NEGATIVE


def _parse_triples(text: str) -> list[GermTriple]:
    out = []
    for chunk in _read_text(text).replace(" ", "").split(";"):
        if not chunk:
            continue
        parts = chunk.strip("()").split(",")
        if len(parts) != 3:
            raise ValueError(f"triple {chunk!r} needs three entries p,q,c")
        p, q = int(parts[0]), int(parts[1])
        c = parts[2]
        cval = complex(c.replace("i", "j")) if ("i" in c or "j" in c) else Fraction(c)
        out.append(GermTriple(p, q, cval))
    return out


def cmd_audit(cfg: RunConfig):
    o = cfg.options
    triples = _parse_triples(o["triples"])
    if o.get("r") is not None:
        for t in triples:
            if t.ratio != o["r"]:
                raise ValueError(f"triple ({t.p},{t.q}) has ratio {t.ratio}, not {o['r']}")
    a = audit_collection(triples, cfg.residual_tol)
    return {"audit": a.to_dict()}, OK if a.m_symmetric else NEGATIVE


def cmd_lemma_scan(cfg: RunConfig):
    o = cfg.options
    scan = lemma_scan(o["rs"], cfg.residual_tol, o["max_p"])
    if cfg.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(scan.CSV_HEADER)
        for row in scan.rows:
            w.writerow(row.csv_row())
        Path(cfg.csv).write_text(buf.getvalue())
    return {"scan": scan.to_dict()}, OK if scan.only_at_two else NEGATIVE


def _germ(text: str) -> PlaneGerm:
    text = _read_text(text)
    if text.lstrip().startswith("{"):
        return PlaneGerm.from_dict(json.loads(text))
    return PlaneGerm.from_text(text)


def cmd_asymptotics(cfg: RunConfig):
    o = cfg.options
    ts = tuple(Fraction(1, 10 * 2**k) for k in range(o["steps"]))
    rep = verify_tangent_asymptotics(_germ(o["b"]), _germ(o["a"]), ts)
    return {"report": rep.to_dict()}, OK if rep.verdict in ("converged", "decay-only") else NEGATIVE


def cmd_certify(cfg: RunConfig):
    o = cfg.options
    F = _plane_curve(o)
    certs = [certify_conic(F, cfg.seed)]
    if o.get("frames"):
        certs += certify_in_frames(F, o["frames"], cfg.seed)
    verdicts = [c.verdict for c in certs]
    if COUNTEREXAMPLE_FLAG in verdicts:
        code = ERROR
    elif all(v == CONIC_CONSISTENT for v in verdicts):
        code = OK
    else:
        code = NEGATIVE
    return {"certificates": [c.to_dict() for c in certs], "verdicts": verdicts}, code


# -- parser --------------------------------------------------------------------------------------------


def _add_convex(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--curve-ellipse", type=_pair, metavar="A,B", help="ellipse x^2/A^2 + y^2/B^2 = 1")
    g.add_argument("--curve-circle", type=float, metavar="R", help="circle of radius R (default 1)")
    g.add_argument("--curve-bumpy", type=_pair, metavar="EPS,K", help="radius 1 + EPS cos(K s)")
    p.add_argument("--integral", help="polynomial integral (default: the curve's own quadratic form)")


def _add_plane(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--curve", help="affine equation in x, y (prefix @ to read a file)")
    g.add_argument("--projective", help="homogeneous equation in x0, x1, x2")


def _add_samples(p):
    p.add_argument("--points", default="auto", help="JSON file of points, or 'auto' to trace the real curve")
    p.add_argument("--start", type=_pair, default=(1.0, 0.5), help="seed point projected onto the curve (auto)")
    p.add_argument("--n", type=int, default=20, help="number of traced points (auto)")
    p.add_argument("--step", type=float, default=0.1, help="arc step between traced points (auto)")
    p.add_argument("--complex", type=int, default=0, help="also test this many nearby complex points")


COMMANDS = {}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="billiard-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, epilog=None):
        p = sub.add_parser(name, help=help_, description=help_, epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
        p.add_argument("--config", help="JSON file whose keys set defaults for this subcommand")
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        p.add_argument("--residual-tol", type=float, default=1e-8)
        p.add_argument("--symmetry-tol", type=float, default=1e-7)
        COMMANDS[name] = (fn, p)
        return p

    p = add("orbit", cmd_orbit, "iterate the outer billiard map", "CSV columns (--csv): k, x, y, s (tangency parameter), residual")
    _add_convex(p)
    p.add_argument("--start", type=_pair, required=True)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--csv", help="write the orbit table here")

    p = add("invariance", cmd_invariance, "check f(T(A)) = f(A) at random outside points")
    _add_convex(p)
    p.add_argument("--n", type=int, default=1000)

    p = add("jacobian", cmd_jacobian, "finite-difference Jacobian determinant of the map")
    _add_convex(p)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--h", type=float, default=1e-5)
    p.add_argument("--tol", type=float, default=1e-5)

    p = add("symmetry", cmd_symmetry, "central symmetry of tangent-line sections of gamma along psi = 0")
    p.add_argument("--psi", required=True)
    p.add_argument("--gamma", required=True)
    _add_samples(p)

    p = add("evenness", cmd_evenness, "evenness of F(P + eps (F_y, -F_x)) and constancy of H(F) for f = g psi^m")
    p.add_argument("--psi", required=True)
    p.add_argument("--g", default="1")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--order", type=int, default=5)
    p.add_argument("--tol", type=float, default=1e-10)
    _add_samples(p)

    p = add("puiseux", cmd_puiseux, "local branches at a point or on the line at infinity")
    _add_plane(p)
    p.add_argument("--point", type=_pair, default=(0.0, 0.0))
    p.add_argument("--infinity", action="store_true")
    p.add_argument("--order", type=int, default=None)

    p = add("invariants", cmd_invariants, "delta, kappa and Hessian order at every notable point; genus and Pluecker check")
    _add_plane(p)
    p.add_argument("--corpus", help="a corpus curve name, or 'all'")

    p = add("pluecker", cmd_pluecker, "3d(d-2) against the sum of Hessian orders")
    _add_plane(p)

    p = add("audit", cmd_audit, "root powers of W-polynomials and their symmetry about 1")
    p.add_argument("--r", type=_rational)
    p.add_argument("--triples", required=True, help="'(p,q,c);(p,q,c)'; c may be rational or complex like 1+1i")

    p = add("lemma-scan", cmd_lemma_scan, "M-symmetry over a grid of ratios", "CSV columns (--csv): r, collection, m_defect, m_symmetric, identity_residual, power_sum_residual")
    p.add_argument("--rs", type=lambda s: [_rational(v) for v in s.split(",")], default=[Fraction(4, 3), Fraction(3, 2), Fraction(2), Fraction(5, 2), Fraction(3)])
    p.add_argument("--max-p", type=int, default=12)
    p.add_argument("--csv", help="write the per-collection table here")

    p = add("asymptotics", cmd_asymptotics, "limits of tangent-line intersection ratios")
    p.add_argument("--b", required=True, help="'z(t), w(t)' with z = t^q, or a JSON germ")
    p.add_argument("--a", required=True, help="'z-axis', 'w-axis', 'z(t), w(t)' or a JSON germ")
    p.add_argument("--steps", type=int, default=13, help="t = 0.1 * 2^-k for k below this")

    p = add("certify", cmd_certify, "conic certification from the branches at infinity")
    _add_plane(p)
    p.add_argument("--frames", type=int, default=0, help="also certify in this many random projective frames")
    return parser


def parse_config(argv) -> RunConfig:
    parser = build_parser()
    args = parser.parse_args(argv)
    fn, sub = COMMANDS[args.command]
    if args.config:
        defaults = json.loads(Path(args.config).read_text())
        sub.set_defaults(**{k.replace("-", "_"): v for k, v in defaults.items()})
        args = parser.parse_args(argv)
        for key in ("curve_ellipse", "curve_bumpy", "start", "point"):
            if isinstance(getattr(args, key, None), list):
                setattr(args, key, tuple(getattr(args, key)))
        if args.command == "lemma-scan" and args.rs and not isinstance(args.rs[0], Fraction):
            args.rs = [_rational(str(v)) for v in args.rs]
    opts = {k: v for k, v in vars(args).items() if k not in ("command", "seed", "config", "out", "csv", "residual_tol", "symmetry_tol")}
    return RunConfig(
        command=args.command,
        seed=args.seed,
        residual_tol=args.residual_tol,
        symmetry_tol=args.symmetry_tol,
        out=args.out,
        csv=getattr(args, "csv", None),
        options=opts,
    )


def run(cfg: RunConfig) -> tuple[str, int]:
    fn, _ = COMMANDS[cfg.command]
    payload, code = fn(cfg)
    text = render(payload, cfg)
    if cfg.out:
        Path(cfg.out).write_text(text)
    return text, code


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:
        return int(exc.code or 0) if exc.code in (0, None) else ERROR
    try:
        text, code = run(cfg)
    except (ValueError, ArithmeticError, RuntimeError, OSError) as exc:
        sys.stderr.write(json.dumps({"schema": SCHEMA, "command": cfg.command, "error": type(exc).__name__, "message": str(exc)}, sort_keys=True) + "\n")
        return ERROR
    if not cfg.out:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
