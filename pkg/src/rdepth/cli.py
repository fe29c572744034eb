"""Command-line front end. Data goes to stdout, diagnostics to stderr."""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .core import RDepthError, format_number, read_csv, round_floats
from .depth import DepthQuery, _tukey, direction_grid, lower_depth, robust_depth
from .experiments import (
    _map,
    breakdown_demo,
    consistency_experiment,
    ordering_experiment,
    resolve_threads,
    subset_count_experiment,
)
from .geometry import contour_2d
from .median import min_delta_full_depth_2d

EXPERIMENTS = ("ordering", "breakdown", "consistency", "subset-count")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _vector(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.split(",")], dtype=np.float64)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list:
    try:
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _dump(obj, args) -> str:
    return json.dumps(round_floats(obj, args.precision), separators=(",", ":"))


def _load_planar(path):
    cloud = read_csv(path)
    if cloud.d != 2:
        raise RDepthError(f"this command needs planar (2-column) data, got d={cloud.d}")
    return cloud


def cmd_depth(args, lower=False):
    cloud = read_csv(args.input)
    query = DepthQuery(args.point, args.delta, n_directions=args.directions, refine=args.refine, seed=args.seed)
    res = lower_depth(cloud, query) if lower else robust_depth(cloud, query)
    out = {"depth": res.depth, "direction": [float(c) for c in res.argmin_direction.u],
           "evaluations": res.evaluations, "refined": res.refined}
    return _dump(out, args) + "\n"


def cmd_grid(args):
    cloud = _load_planar(args.input)
    if not (args.xmin < args.xmax and args.ymin < args.ymax):
        raise RDepthError("grid needs xmin < xmax and ymin < ymax")
    if args.nx < 2 or args.ny < 2:
        raise RDepthError("grid needs nx >= 2 and ny >= 2")
    xs = np.linspace(args.xmin, args.xmax, args.nx)
    ys = np.linspace(args.ymin, args.ymax, args.ny)
    dirs = direction_grid(2, args.directions)
    pts = cloud.points
    if args.mode in ("robust", "lower") and args.delta == 0.0:
        mode = "tukey" if args.mode == "robust" else "lower"
    else:
        mode = args.mode
    from . import _backend

    def value(z):
        if mode == "min_delta":
            return min_delta_full_depth_2d(cloud, z)
        if mode == "tukey":
            return _tukey(cloud, z, None)[0]
        if mode == "robust":
            return float(_backend.sup_values(pts, z, dirs, args.delta).min())
        return float(_backend.inf_values(pts, z, dirs, args.delta).min())

    zs = [np.array([x, y]) for y in ys for x in xs]
    values = _map(value, zs, args.threads)
    return "".join(f"{format_number(z[0], args.precision)},{format_number(z[1], args.precision)},"
                   f"{format_number(v, args.precision)}\n" for z, v in zip(zs, values))


def cmd_contour(args):
    cloud = _load_planar(args.input)
    poly = contour_2d(cloud, args.delta, args.alpha, center=args.center, n_rays=args.rays, mode=args.mode,
                      n_directions=args.directions, exact_outer=not args.no_exact_outer)
    if args.format == "json":
        return poly.to_json(args.precision) + "\n"
    return poly.to_csv(args.precision)


def cmd_min_delta(args):
    cloud = _load_planar(args.input)
    return _dump({"min_delta": min_delta_full_depth_2d(cloud, args.point)}, args) + "\n"


def cmd_member(args):
    cloud = _load_planar(args.input)
    if not args.delta > 0:
        raise RDepthError("median-member needs --delta > 0")
    md = min_delta_full_depth_2d(cloud, args.point)
    return _dump({"member": bool(md <= args.delta), "min_delta": md}, args) + "\n"


def cmd_experiment(args):
    if args.name not in EXPERIMENTS:
        raise RDepthError(f"unknown experiment {args.name!r}; valid names: {', '.join(EXPERIMENTS)}")
    threads = args.threads
    if args.name == "ordering":
        report = ordering_experiment(d=args.d, n=args.n or 50, delta=args.delta, replicates=args.reps or 1999,
                                     seed=args.seed, n_directions=args.directions, threads=threads)
    elif args.name == "subset-count":
        report = subset_count_experiment(correlation=args.correlation, n=args.n or 100,
                                         replicates=args.reps or 1000, seed=args.seed, threads=threads)
    elif args.name == "consistency":
        n_values = args.n_values or ([args.n] if args.n else [100, 1000, 5000])
        report = consistency_experiment(n_values=n_values, delta=args.delta, seed=args.seed,
                                        n_directions=args.directions, threads=threads)
    else:
        if args.input:
            cloud = read_csv(args.input)
        else:
            cloud = np.random.default_rng(args.seed).standard_normal((args.n or 100, args.d))
        report = breakdown_demo(cloud, args.delta, args.m, args.t, seed=args.seed, n_directions=args.directions)
    if args.format == "text":
        return report.to_text(args.precision, timing=args.timing)
    return report.to_json(args.precision, timing=args.timing) + "\n"


def _common_options(default):
    common = _Parser(add_help=False)
    common.add_argument("--threads", type=int, default=default,
                        help="worker threads (default: RDEPTH_THREADS or 1)")
    common.add_argument("--precision", type=int, default=default,
                        help="significant digits for numeric output (default: round-trip)")
    return common


def build_parser() -> argparse.ArgumentParser:
    # the global options are accepted before or after the subcommand; the
    # subcommand copies must not overwrite a value given before it
    parser = _Parser(prog="rdepth", description="Distributionally robust halfspace depth.",
                     parents=[_common_options(None)])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    common = _common_options(argparse.SUPPRESS)

    def add(name, help_text):
        return sub.add_parser(name, help=help_text, parents=[common])

    for name in ("depth", "lower-depth"):
        p = add(name, "depth of one point")
        p.add_argument("--input", required=True)
        p.add_argument("--point", type=_vector, required=True)
        p.add_argument("--delta", type=float, required=True)
        p.add_argument("--directions", type=int, default=1000)
        p.add_argument("--refine", action="store_true")
        p.add_argument("--seed", type=int, default=0)

    p = add("grid", "values on a regular planar grid as x,y,value rows")
    p.add_argument("--input", required=True)
    for k in ("xmin", "xmax", "ymin", "ymax"):
        p.add_argument(f"--{k}", type=float, required=True)
    p.add_argument("--nx", type=int, required=True)
    p.add_argument("--ny", type=int, required=True)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--mode", choices=("robust", "lower", "tukey", "min_delta"), default="robust")
    p.add_argument("--directions", type=int, default=1000)

    p = add("contour", "closed polyline of a depth level set")
    p.add_argument("--input", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--rays", type=int, default=128)
    p.add_argument("--mode", choices=("robust", "lower", "tukey"), default="robust")
    p.add_argument("--center", type=_vector, default=None)
    p.add_argument("--directions", type=int, default=1000)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--no-exact-outer", action="store_true", help="trace outer levels instead of offsetting the hull")

    p = add("median-min-delta", "smallest radius giving depth 1 at a point")
    p.add_argument("--input", required=True)
    p.add_argument("--point", type=_vector, required=True)

    p = add("median-member", "whether a point has depth 1 at a radius")
    p.add_argument("--input", required=True)
    p.add_argument("--point", type=_vector, required=True)
    p.add_argument("--delta", type=float, required=True)

    p = add("experiment", f"run a seeded study ({', '.join(EXPERIMENTS)})")
    p.add_argument("name")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--n-values", type=_int_list, default=None)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--correlation", type=float, default=0.0)
    p.add_argument("--m", type=int, default=5)
    p.add_argument("--t", type=float, default=100.0)
    p.add_argument("--input", default=None)
    p.add_argument("--directions", type=int, default=1000)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--timing", action="store_true", help="include wall-clock seconds (breaks byte-identity)")
    return parser


HANDLERS = {
    "depth": cmd_depth,
    "lower-depth": lambda a: cmd_depth(a, lower=True),
    "grid": cmd_grid,
    "contour": cmd_contour,
    "median-min-delta": cmd_min_delta,
    "median-member": cmd_member,
    "experiment": cmd_experiment,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.threads = resolve_threads(args.threads)
        if args.precision is not None and args.precision < 1:
            raise RDepthError("--precision must be >= 1")
        out = HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"rdepth: {exc}", file=sys.stderr)
        return 1
    except (RDepthError, ValueError, OSError) as exc:
        print(f"rdepth: error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
