"""Command line front end: ``hyperballs {dist,ball,radii,verify,figures}``.

Exit codes: 0 ok, 1 asserted claim violated, 2 usage error, 3 validity or
domain error, 4 report-mode violation under ``--strict``.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time

import numpy as np

from .balls import q_ball_euclidean, rho_ball_euclidean, sample_metric_sphere_2d
from .errors import ConfigurationError, DomainError, EmptyBoundaryError, ValidityError
from .figures import FIGURE_SETS, Svg, fmt
from .geometry import HalfSpace, PuncturedSpace, UnitBall, rectangle
from .metrics import MetricKind, metric_eval
from .radii import CLAIMS, q_threshold
from .verify import STANDARD_N, STANDARD_N_K, ClaimSpec, run_claims

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_VALIDITY, EXIT_STRICT = 0, 1, 2, 3, 4
OUTDIR_ENV = "HYPERBALLS_OUTDIR"


class UsageError(Exception):
    pass


def parse_point(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise UsageError(f"bad point {text!r}; expected comma-separated numbers") from None


def parse_domain(text: str, n: int = 2):
    """``unit-ball``, ``half-plane``, ``punctured[:x,y;x,y]`` or ``rectangle:w,h``."""
    name, _, arg = text.partition(":")
    if name == "unit-ball":
        return UnitBall(n)
    if name in ("half-plane", "half-space"):
        return HalfSpace(n)
    if name == "punctured":
        pts = [parse_point(p) for p in arg.split(";")] if arg else [np.zeros(n)]
        return PuncturedSpace(tuple(map(tuple, pts)))
    if name == "rectangle":
        w, h = parse_point(arg or "2,1")
        return rectangle(w, h)
    raise UsageError(f"unknown domain {text!r}")


def _out_path(path: str | None, default: str | None = None) -> str | None:
    path = path or default
    if path is None:
        return None
    base = os.environ.get(OUTDIR_ENV)
    if base and not os.path.isabs(path):
        os.makedirs(base, exist_ok=True)
        path = os.path.join(base, path)
    return path


def _emit(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        d = os.path.dirname(path)
        if d:
            os.makedirs(d, exist_ok=True)
        with open(path, "w") as fh:
            fh.write(text)


def _config_line(args) -> str:
    skip = {"func"}
    items = [f"{k}={v}" for k, v in sorted(vars(args).items()) if k not in skip]
    return "hyperballs " + args.command + " " + " ".join(items)


# ---------------------------------------------------------------------------
# subcommands


def cmd_dist(args) -> int:
    x, y = parse_point(args.x), parse_point(args.y)
    G = parse_domain(args.domain, len(x))
    v = metric_eval(args.metric, G, x, y, args.qh_tol)
    print(f"# {_config_line(args)}")
    print(fmt(v))
    return EXIT_OK


def cmd_ball(args) -> int:
    x = parse_point(args.x)
    G = parse_domain(args.domain, len(x))
    kind = MetricKind.parse(args.metric)
    if not args.r > 0:
        raise ValidityError(f"radius must be positive, got {args.r}")
    s = sample_metric_sphere_2d(G, kind, x, args.r, args.N)
    header = _config_line(args) + f" skipped={len(s.skipped)}"
    if args.format == "csv":
        lines = [f"# {header}", "angle,x,y"]
        lines += [f"{fmt(a)},{fmt(p[0])},{fmt(p[1])}" for a, p in zip(s.angles, s.points)]
        text = "\n".join(lines) + "\n"
    else:
        P = s.points
        lo, hi = P.min(axis=0), P.max(axis=0)
        if isinstance(G, UnitBall):
            lo, hi = np.minimum(lo, -1.0), np.maximum(hi, 1.0)
        pad = 0.05 * float(np.max(hi - lo))
        svg = Svg((lo[0] - pad, hi[0] + pad, lo[1] - pad, hi[1] + pad), header=header)
        if isinstance(G, UnitBall):
            svg.circle((0.0, 0.0), 1.0)
        svg.polyline(P, closed=not len(s.skipped), label=f"S_{kind.symbol}")
        exact = _exact_ball(G, kind, x, args.r)
        if exact is not None:
            svg.circle(exact.center, exact.radius, "#1e8449", dashed=True, label="exact")
        svg.point(x)
        svg.caption(f"S_{kind.symbol}(x, {args.r}) in the {G.name}")
        text = svg.to_string()
    _emit(text, _out_path(args.out))
    return EXIT_OK


def _exact_ball(G, kind, x, r):
    if not isinstance(G, UnitBall):
        return None
    if kind is MetricKind.HYPERBOLIC:
        return rho_ball_euclidean(x, r)
    if kind is MetricKind.CHORDAL and r < q_threshold(float(np.linalg.norm(x))):
        return q_ball_euclidean(x, r)
    return None


def cmd_radii(args) -> int:
    c = CLAIMS.get(args.claim)
    if c is None:
        raise UsageError(f"unknown claim {args.claim!r}; known: {', '.join(CLAIMS)}")
    b = c.radii(args.absx, args.r)
    print(f"# {_config_line(args)}")
    print(f"claim={b.claim}")
    print(f"inclusion=B_{c.ball.symbol}(x,m) < B_{c.radius.symbol}(x,r) < B_{c.ball.symbol}(x,M)")
    print(f"m={fmt(b.m) if math.isfinite(b.m) else 'inf'}")
    print(f"M={fmt(b.M) if math.isfinite(b.M) else 'inf'}")
    print(f"sharp={str(b.sharp).lower()}")
    v = b.validity
    for k in ("r0", "r1", "r2"):
        if getattr(v, k) is not None:
            print(f"{k}={fmt(getattr(v, k))}")
    for name, (lo, hi) in v.intervals.items():
        print(f"{name}=[{fmt(lo)},{fmt(hi)})")
    if v.interval:
        print(f"interval={v.interval}")
    if v.note:
        print(f"note={v.note}")
    for k, val in b.components.items():
        print(f"{k}={fmt(val) if isinstance(val, float) and math.isfinite(val) else str(val).lower()}")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.all:
        names = list(CLAIMS)
    elif args.claim:
        names = args.claim
    else:
        raise UsageError("verify needs --all or at least one --claim")
    for n in names:
        if n not in CLAIMS:
            raise UsageError(f"unknown claim {n!r}")
    absx = tuple(float(v) for v in args.absx.split(",")) if args.absx else None
    rs = tuple(float(v) for v in args.r.split(",")) if args.r else None
    specs = []
    for n in names:
        kw = dict(N=args.N, N_k=args.N_k, seed=args.seed, qh_tol=args.qh_tol)
        if absx:
            kw["absx"] = absx
        if rs:
            kw["r"] = rs
        specs.append(ClaimSpec(n, **kw))
    t0 = time.perf_counter()
    report = run_claims(specs, workers=args.workers, strict=args.strict)
    text = f"# {_config_line(args)}\n" + report.to_text(timing=args.timing)
    path = _out_path(args.out)
    _emit(text, path)
    if path is not None:
        fails = report.assert_failures()
        print(
            f"{len(report.records)} records, {len(fails)} assert failures, "
            f"{len(report.report_failures())} report failures, {time.perf_counter() - t0:.1f}s -> {path}"
        )
    return report.exit_code


def cmd_figures(args) -> int:
    names = list(FIGURE_SETS) if args.set == "all" else [args.set]
    outdir = args.outdir or os.environ.get(OUTDIR_ENV) or "."
    os.makedirs(outdir, exist_ok=True)
    header = _config_line(args)
    for n in names:
        for fname, text in FIGURE_SETS[n](N=args.N, header=header).items():
            path = os.path.join(outdir, fname)
            _emit(text, path)
            print(path)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hyperballs", description="Balls of hyperbolic-type metrics.")
    sub = ap.add_subparsers(dest="command", required=True)
    metrics = sorted({"j", "rho", "k", "q", "hyperbolic", "quasihyperbolic", "chordal", "distance-ratio"})

    p = sub.add_parser("dist", help="evaluate a metric between two points")
    p.add_argument("--domain", default="unit-ball")
    p.add_argument("--metric", required=True, choices=metrics)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--qh-tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("ball", help="sample a metric circle in the plane")
    p.add_argument("--domain", default="unit-ball")
    p.add_argument("--metric", required=True, choices=[m for m in metrics if m not in ("k", "quasihyperbolic")])
    p.add_argument("--x", required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--N", type=int, default=360)
    p.add_argument("--format", choices=["csv", "svg"], default="csv")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.set_defaults(func=cmd_ball)

    p = sub.add_parser("radii", help="inclusion radii for one claim")
    p.add_argument("--claim", required=True, help=", ".join(CLAIMS))
    p.add_argument("--absx", type=float, required=True)
    p.add_argument("--r", type=float, required=True)
    p.set_defaults(func=cmd_radii)

    p = sub.add_parser("verify", help="check inclusion claims by sampling")
    p.add_argument("--all", action="store_true")
    p.add_argument("--claim", action="append")
    p.add_argument("--absx", default=None, help="comma-separated |x| grid")
    p.add_argument("--r", default=None, help="comma-separated r grid")
    p.add_argument("--N", type=int, default=STANDARD_N)
    p.add_argument("--N-k", type=int, default=STANDARD_N_K, dest="N_k")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--qh-tol", type=float, default=1e-6)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--strict", action="store_true", help="exit 4 on report-mode violations")
    p.add_argument("--timing", action="store_true", help="add wall times to the records")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("figures", help="write a named SVG figure set")
    p.add_argument("--set", default="all", choices=["all", *FIGURE_SETS])
    p.add_argument("--outdir", default=None)
    p.add_argument("--N", type=int, default=720)
    p.set_defaults(func=cmd_figures)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, ConfigurationError) as e:
        print(f"hyperballs: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidityError, DomainError, EmptyBoundaryError) as e:
        print(f"hyperballs: validity error: {e}", file=sys.stderr)
        return EXIT_VALIDITY


if __name__ == "__main__":
    sys.exit(main())
