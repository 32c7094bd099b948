"""Command-line interface.

Exit codes: 0 success, 1 negative result (nonmember or failed
verification), 2 usage or format error, 3 bound violation or internal
stall.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .exceptions import EventScanFailed, JointRangeError, NonMember, PathTrackingFailed, ReductionStalled
from .hull import project_to_hull
from .io import (
    FormatError,
    decomposition_to_dict,
    read_decomposition,
    read_operators,
    write_decomposition,
)
from .joint_range import sample_points
from .reduce import DECOMPOSITION_TOL, caratheodory_experiment, decompose, verify

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_STALL = 0, 1, 2, 3
SVG_SIZE = 800
SVG_MARGIN = 40


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x: float) -> str:
    return f"{x:.17g}"


def fmt_vec(v) -> str:
    return ",".join(fmt(float(x)) for x in v)


def parse_point(text: str, d: int) -> np.ndarray:
    try:
        p = np.array([float(s) for s in text.split(",")], dtype=float)
    except ValueError as exc:
        raise UsageError(f"cannot parse point {text!r}") from exc
    if p.shape != (d,):
        raise UsageError(f"point has {p.size} coordinates, operators have d={d}")
    if not np.all(np.isfinite(p)):
        raise UsageError("point has non-finite coordinates")
    return p


def parse_target(text: str):
    if text == "auto":
        return "auto"
    try:
        k = int(text)
    except ValueError as exc:
        raise UsageError(f"--target must be 'auto' or an integer, got {text!r}") from exc
    if k < 1:
        raise UsageError("--target must be >= 1")
    return k


def _print_certificate(exc_or_proj, out):
    g = exc_or_proj.certificate
    print(f"nonmember margin={fmt(exc_or_proj.margin)} direction={fmt_vec(g)}", file=out)


def cmd_decompose(args, out) -> int:
    Ts = read_operators(args.ops)
    p = parse_point(args.point, Ts.d)
    target = parse_target(args.target)
    try:
        dec = decompose(Ts, p, target=target, tol=args.tol, eps=args.eps, seed=args.seed)
    except NonMember as exc:
        _print_certificate(exc, out)
        return EXIT_NEGATIVE
    except (ReductionStalled, PathTrackingFailed, EventScanFailed) as exc:
        print(f"stalled: {exc}", file=sys.stderr)
        return EXIT_STALL
    summary = f"atoms={len(dec)} residual={fmt(dec.residual)} bound_used={dec.bound_used}"
    if args.out:
        write_decomposition(dec, args.out)
        print(summary, file=out)
    else:
        out.write(json.dumps(decomposition_to_dict(dec), indent=1) + "\n")
        print(summary, file=sys.stderr)
    return EXIT_OK


def cmd_member(args, out) -> int:
    Ts = read_operators(args.ops)
    p = parse_point(args.point, Ts.d)
    if args.eps is not None and args.eps <= 0:
        raise UsageError("--eps must be positive")
    proj = project_to_hull(Ts, p, eps=args.eps)
    if proj.status == "member":
        print(f"member distance={fmt(proj.distance)} atoms={len(proj.atoms)}", file=out)
        return EXIT_OK
    if proj.status == "nonmember":
        _print_certificate(proj, out)
        return EXIT_NEGATIVE
    print(f"undecided distance={fmt(proj.distance)} after {proj.iterations} iterations", file=out)
    return EXIT_STALL


def cmd_sample(args, out) -> int:
    if args.count < 1:
        raise UsageError("--n must be >= 1")
    Ts = read_operators(args.ops)
    X = sample_points(Ts, args.count, seed=args.seed)
    header = [f"x{k + 1}" for k in range(Ts.d)]
    if args.project:
        try:
            cols = [int(s) - 1 for s in args.project.split(",")]
        except ValueError as exc:
            raise UsageError(f"cannot parse --project {args.project!r}") from exc
        if len(cols) != 2 or any(not 0 <= c < Ts.d for c in cols):
            raise UsageError(f"--project needs two indices in 1..{Ts.d}")
        X = X[:, cols]
        header = [header[c] for c in cols]
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in X:
        buf.write(fmt_vec(row) + "\n")
    if args.out:
        Path(args.out).write_text(buf.getvalue())
    else:
        out.write(buf.getvalue())
    return EXIT_OK


def read_cloud(path):
    """Header and ``(m, 2)`` data of a two-column CSV."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    rows = [r for r in rows if r]
    if len(rows) < 2:
        raise FormatError("CSV has no data rows")
    if any(len(r) != 2 for r in rows):
        raise FormatError("plot needs exactly two columns")
    try:
        return rows[0], np.array([[float(a), float(b)] for a, b in rows[1:]])
    except ValueError as exc:
        raise FormatError(f"non-numeric CSV entry: {exc}") from exc


def render_svg(P: np.ndarray, labels=("x", "y")) -> str:
    """Scatter plot on a fixed 800x800 canvas with autoscaled axes."""
    lo, hi = P.min(axis=0), P.max(axis=0)
    span = hi - lo
    for k in range(2):
        if span[k] <= 0:
            lo[k] -= 0.5
            span[k] = 1.0
    inner = SVG_SIZE - 2 * SVG_MARGIN
    X = SVG_MARGIN + (P[:, 0] - lo[0]) / span[0] * inner
    Y = SVG_SIZE - SVG_MARGIN - (P[:, 1] - lo[1]) / span[1] * inner
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" '
        f'viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">',
        f'<rect width="{SVG_SIZE}" height="{SVG_SIZE}" fill="white"/>',
        f'<rect x="{SVG_MARGIN}" y="{SVG_MARGIN}" width="{inner}" height="{inner}" fill="none" stroke="#888"/>',
        f'<text x="{SVG_MARGIN}" y="{SVG_SIZE - 12}" font-size="12">{labels[0]}: [{lo[0]:.4g}, {lo[0] + span[0]:.4g}]</text>',
        f'<text x="{SVG_MARGIN}" y="{SVG_MARGIN - 12}" font-size="12">{labels[1]}: [{lo[1]:.4g}, {lo[1] + span[1]:.4g}]</text>',
    ]
    parts += [f'<circle cx="{x:.2f}" cy="{y:.2f}" r="1.5" fill="#1f4e9c"/>' for x, y in zip(X, Y)]
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_plot(args, out) -> int:
    header, P = read_cloud(args.csv)
    svg = render_svg(P, tuple(header))
    Path(args.out).write_text(svg)
    return EXIT_OK


def cmd_experiment(args, out) -> int:
    if args.d < 1 or args.n < 1 or args.trials < 1:
        raise UsageError("--d, --n and --trials must be >= 1")
    report = caratheodory_experiment(args.d, args.n, args.trials, seed=args.seed, tol=args.tol)
    hist = " ".join(f"{k}:{v}" for k, v in report["histogram"].items())
    print(f"d={args.d} n={args.n} trials={args.trials} seed={args.seed} bound={report['bound']}", file=out)
    print(f"max_atoms={report['max_atoms']}", file=out)
    print(f"histogram {hist}", file=out)
    print(f"failures={len(report['failures'])}", file=out)
    for f in report["failures"]:
        print(f"  trial {f['trial']}: {f['error']}", file=out)
    if args.json:
        Path(args.json).write_text(json.dumps(report, indent=1) + "\n")
    return EXIT_OK if not report["failures"] else EXIT_STALL


def cmd_verify(args, out) -> int:
    Ts = read_operators(args.ops)
    dec = read_decomposition(args.decomp)
    if dec.target.shape != (Ts.d,) or any(a.witness.shape != (Ts.n,) for a in dec.atoms):
        raise UsageError(f"decomposition does not match operators with d={Ts.d}, n={Ts.n}")
    rep = verify(Ts, dec)
    problems = []
    if rep["residual"] > dec.residual + 1e-9:
        problems.append(f"residual {fmt(rep['residual'])} exceeds stored {fmt(dec.residual)}")
    if rep["weight_sum_error"] > 1e-10:
        problems.append(f"weights sum off by {fmt(rep['weight_sum_error'])}")
    if rep["witness_norm_errors"] and max(rep["witness_norm_errors"]) > 1e-10:
        problems.append("witness vectors are not unit")
    if rep["atom_count"] == 0 or rep["min_weight"] <= 0:
        problems.append("weights must be positive")
    if rep["atom_count"] > dec.bound_used:
        problems.append(f"{rep['atom_count']} atoms exceed bound {dec.bound_used}")
    print(
        f"residual={fmt(rep['residual'])} weight_sum_error={fmt(rep['weight_sum_error'])} "
        f"atoms={rep['atom_count']} bound_used={dec.bound_used}",
        file=out,
    )
    for msg in problems:
        print(f"FAIL {msg}", file=out)
    return EXIT_NEGATIVE if problems else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="jointrange", description="Joint numerical ranges and short convex decompositions.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("decompose", help="write a point as a short convex combination of range points")
    p.add_argument("--ops", required=True, help="operator JSON file")
    p.add_argument("--point", required=True, help="comma-separated coordinates (use --point=-1,0 for negatives)")
    p.add_argument("--target", default="auto", help="atom count target: 'auto' (default) or an integer")
    p.add_argument("--tol", type=float, default=DECOMPOSITION_TOL, help="residual budget (default %(default)s)")
    p.add_argument("--eps", type=float, default=None, help="membership tolerance (default 1e-8*(1+|p|))")
    p.add_argument("--seed", type=int, default=0, help="seed for path waypoints (default 0)")
    p.add_argument("--out", help="decomposition JSON output (default: stdout)")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("member", help="decide membership in the convex hull")
    p.add_argument("--ops", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--eps", type=float, default=None, help="membership tolerance (default 1e-8*(1+|p|))")
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("sample", help="sample the joint range to CSV")
    p.add_argument("--ops", required=True)
    p.add_argument("--n", dest="count", type=int, default=1000, help="number of samples (default 1000)")
    p.add_argument("--seed", type=int, default=0, help="sampling seed (default 0)")
    p.add_argument("--project", help="keep two 1-based coordinates, e.g. 1,3")
    p.add_argument("--out", help="CSV output (default: stdout)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("plot", help="render a two-column CSV as an SVG scatter plot")
    p.add_argument("--csv", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("experiment", help="measure atom counts over random instances")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=50, help="number of trials (default 50)")
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--tol", type=float, default=DECOMPOSITION_TOL)
    p.add_argument("--json", help="also write the report as JSON")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("verify", help="recheck a decomposition file against operators")
    p.add_argument("--decomp", required=True)
    p.add_argument("--ops", required=True)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except (UsageError, FormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except JointRangeError as exc:
        print(f"internal failure: {exc}", file=sys.stderr)
        return EXIT_STALL


if __name__ == "__main__":
    sys.exit(main())
