"""Command-line interface: ``run``, ``geodesic``, ``lift`` and ``verify``."""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .exceptions import ConfigError, HeisTriodError
from .experiments import builtin_experiment, builtin_ids, default_output_root, load_config, run_experiment
from .flow import FlowStatus
from .geodesics import geodesic_between
from .geometry import horizontal_lift
from .io import read_polyline_csv, write_polyline_csv

EXIT_CODES = {
    FlowStatus.REACHED_T: 0,
    FlowStatus.STEADY_STATE: 3,
    FlowStatus.SINGULARITY: 4,
    FlowStatus.NUMERIC_FAILURE: 5,
}
EXIT_USAGE = 2


def _triple(text):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}") from None
    if len(vals) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    return np.array(vals)


def _times(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated times, got {text!r}") from None


def _anchor(text):
    side, _, value = text.partition(":")
    if side not in ("start", "end") or not value:
        raise argparse.ArgumentTypeError("anchor must be start:z or end:z")
    try:
        return side, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad anchor height {value!r}") from None


def build_parser():
    parser = argparse.ArgumentParser(prog="heistriod", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a preset or a configuration file")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--experiment", help=f"preset id ({', '.join(builtin_ids())})")
    src.add_argument("--config", type=Path, help="JSON configuration file")
    run.add_argument("--J", type=int)
    run.add_argument("--dt", type=float)
    run.add_argument("--T", type=float)
    run.add_argument("--eps-sing", type=float)
    run.add_argument("--eps-steady", type=float)
    run.add_argument("--out", type=Path, help="output directory (default $HEIS_TRIOD_OUT/<name>)")
    run.add_argument("--svg", action=argparse.BooleanOptionalAction, default=None, help="write SVG plots")
    run.add_argument("--snapshots", type=_times, help="comma-separated snapshot times")

    geo = sub.add_parser("geodesic", help="sample a length minimiser between two points")
    geo.add_argument("--from", dest="start", type=_triple, required=True, metavar="x,y,z")
    geo.add_argument("--to", dest="end", type=_triple, required=True, metavar="x,y,z")
    geo.add_argument("--samples", type=int, default=100)
    geo.add_argument("--alpha0", type=float, default=0.0, help="initial angle for vertically aligned points")
    geo.add_argument("--out", type=Path, help="CSV file for the nodes (default stdout)")

    lift = sub.add_parser("lift", help="horizontal lift of a planar polyline")
    lift.add_argument("--in", dest="src", type=Path, required=True, help="CSV with x,y columns")
    lift.add_argument("--anchor", type=_anchor, required=True, metavar="start:z|end:z")
    lift.add_argument("--out", type=Path, help="CSV file for the lifted nodes (default stdout)")

    ver = sub.add_parser("verify", help="run the acceptance checks that involve one preset")
    ver.add_argument("--experiment", required=True)
    return parser


def _cmd_run(args):
    try:
        cfg = builtin_experiment(args.experiment) if args.experiment else load_config(args.config)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    cfg = cfg.with_overrides(
        J=args.J,
        dt=args.dt,
        T=args.T,
        eps_sing=args.eps_sing,
        eps_steady=args.eps_steady,
        svg=args.svg,
        snapshots=args.snapshots,
    )
    out_dir = args.out if args.out is not None else default_output_root() / cfg.name
    try:
        res = run_experiment(cfg, out_dir)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    o = res.outcome
    lengths = ", ".join(f"{v:.6f}" for v in o.final_state.lengths())
    print(f"{cfg.name}: {o.status.value} at t={o.final_state.time:.6g} after {o.steps} steps")
    print(f"curve lengths: {lengths}")
    if o.vanished_curve is not None:
        print(f"vanished curve: {o.vanished_curve}")
    if o.message:
        print(o.message)
    for name, path in res.files.items():
        print(f"{name}: {path}")
    return EXIT_CODES[o.status]


def _emit_polyline(nodes, out):
    if out is None:
        print("x,y,z")
        for row in nodes:
            print(",".join(format(float(v), ".17g") for v in row))
    else:
        write_polyline_csv(nodes, out)


def _cmd_geodesic(args):
    try:
        nodes, spec = geodesic_between(args.start, args.end, samples=args.samples, alpha0=args.alpha0)
    except (HeisTriodError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    info = f"kind={spec.kind.value} lambda={spec.lam:.12g} length={spec.s_f:.12g} alpha0={spec.alpha0:.12g}"
    if spec.kind.value == "VerticalFamily":
        info += f" k={spec.k_cover}"
    print(info, file=sys.stderr)
    _emit_polyline(nodes, args.out)
    return 0


def _cmd_lift(args):
    try:
        pts = read_polyline_csv(args.src)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    side, z = args.anchor
    lifted = horizontal_lift(pts[:, :2], **({"z_start": z} if side == "start" else {"z_end": z}))
    _emit_polyline(lifted, args.out)
    return 0


def _cmd_verify(args):
    from .verify import checks_for_experiment

    try:
        builtin_experiment(args.experiment)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    ok = True
    for check in checks_for_experiment(args.experiment):
        res = check()
        print(res.line())
        ok &= res.passed
    return 0 if ok else 1


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    handler = {"run": _cmd_run, "geodesic": _cmd_geodesic, "lift": _cmd_lift, "verify": _cmd_verify}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
