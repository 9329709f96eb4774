"""Command-line front end: single-shape bounds, benchmark tables, parameter sweeps.

Commands
--------
bounds    two-sided constant bounds for one ``(alpha, theta, h)`` shape (JSON)
table1    relaxed minima and their lower bounds over the seven benchmark angles
table2    two-sided constant bounds over the seven benchmark angles
contour   upper-bound grid over positions of the third vertex (CSV)
sweep     bound convergence over a list of mesh resolutions (CSV)

Numbers print with 5 significant digits by default (``--full-precision``
for shortest round-trip floats).  Exit codes: 0 success, 2 usage error,
1 computational failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .bounds import (cl_upper_for_triangle, compute_bound_report,
                     lambda_lower_cor31)
from .errors import InterpConstError
from .geometry import Triangle
from .mesh import dump_csv, uniform_mesh

#: Benchmark angles and the certificate degrees used for them.
TABLE_THETAS = (("pi/6", math.pi / 6, 9), ("pi/4", math.pi / 4, 8),
                ("pi/3", math.pi / 3, 10), ("pi/2", math.pi / 2, 9),
                ("2pi/3", 2 * math.pi / 3, 8), ("3pi/4", 3 * math.pi / 4, 10),
                ("5pi/6", 5 * math.pi / 6, 8))

_PI_RE = re.compile(r"^\s*(\d+(?:\.\d*)?)?\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$",
                    re.IGNORECASE)


def parse_theta(text: str) -> float:
    """Parse an angle given in radians or as a fraction of pi.

    Accepts e.g. ``1.2``, ``pi``, ``pi/6``, ``2pi/3``, ``3*pi/4``.
    """
    m = _PI_RE.match(text)
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * math.pi / den
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"cannot parse angle {text!r} (use radians or forms like 'pi/6', '2pi/3')")


def default_degree(theta: float) -> int:
    """Certificate degree keyed to the nearest benchmark angle."""
    return min(TABLE_THETAS, key=lambda row: abs(row[1] - theta))[2]


def _fmt(value, full: bool) -> str:
    if value is None:
        return ""
    if full:
        return repr(float(value))
    return f"{float(value):.5g}"


def _workers(args) -> int:
    if args.workers is not None:
        return max(1, args.workers)
    env = os.environ.get("INTERPCONST_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _parallel_map(fn, tasks, workers: int):
    """Order-preserving map over tasks, optionally across processes."""
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=1))


def _emit(lines, path: str | None):
    text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_bounds(args) -> int:
    degree = args.degree
    if degree is None and not args.no_lower:
        degree = default_degree(args.theta)
    if args.dump_mesh:
        from .geometry import make_triangle

        mesh = uniform_mesh(make_triangle(args.alpha, args.theta, 1.0), args.N)
        dump_csv(mesh, args.dump_mesh)
    report = compute_bound_report(
        args.alpha, args.theta, args.h, args.N,
        fit_degree=None if args.no_lower else degree,
        sample_density=args.sample_density, solver=args.solver,
        cross_check=not args.no_cross_check)
    data = report.to_dict()
    if not args.full_precision:
        data = {k: (float(_fmt(v, False)) if isinstance(v, float) else v)
                for k, v in data.items()}
    _emit([json.dumps(data, indent=2)], args.output)
    return 0


def _table_rows(args, with_lower: bool):
    rows = []
    for name, theta, degree in TABLE_THETAS:
        for n_subdiv in args.N:
            rows.append((name, theta, degree, n_subdiv))
    return rows


def cmd_table1(args) -> int:
    full = args.full_precision
    lines = ["theta,N,lambda_hB,thm31,cor31"]
    for name, theta, _deg, n_subdiv in _table_rows(args, with_lower=False):
        r = compute_bound_report(1.0, theta, 1.0, n_subdiv, fit_degree=None,
                                 solver=args.solver,
                                 cross_check=not args.no_cross_check)
        lines.append(f"{name},{n_subdiv},{_fmt(r.lambda_hB, full)},"
                     f"{_fmt(r.lambda_lb_thm31, full)},{_fmt(r.lambda_lb_cor31, full)}")
    _emit(lines, args.output)
    return 0


def cmd_table2(args) -> int:
    full = args.full_precision
    lines = ["theta,N,degree,cl_lower,lambda_hB,cl_upper"]
    for name, theta, degree, n_subdiv in _table_rows(args, with_lower=True):
        r = compute_bound_report(1.0, theta, 1.0, n_subdiv, fit_degree=degree,
                                 sample_density=args.sample_density,
                                 solver=args.solver,
                                 cross_check=not args.no_cross_check)
        lines.append(f"{name},{n_subdiv},{degree},{_fmt(r.cl_lower, full)},"
                     f"{_fmt(r.lambda_hB, full)},{_fmt(r.cl_upper, full)}")
    _emit(lines, args.output)
    return 0


def _contour_task(task):
    x, y, n_subdiv, solver, cross_check = task
    try:
        tri = Triangle((0.0, 0.0), (1.0, 0.0), (x, y))
        return cl_upper_for_triangle(tri, n_subdiv, solver=solver,
                                     cross_check=cross_check)
    except InterpConstError:
        return float("nan")


def cmd_contour(args) -> int:
    full = args.full_precision
    xs = np.linspace(args.xmin, args.xmax, args.nx)
    ys = np.linspace(args.ymin, args.ymax, args.ny)
    tasks = [(float(x), float(y), args.N, args.solver, not args.no_cross_check)
             for y in ys for x in xs]
    values = _parallel_map(_contour_task, tasks, _workers(args))
    lines = ["x,y,cl_upper"]
    for (x, y, *_), v in zip(tasks, values):
        val = "nan" if (v is None or math.isnan(v)) else _fmt(v, full)
        lines.append(f"{_fmt(x, full)},{_fmt(y, full)},{val}")
    _emit(lines, args.output)
    return 0


def _sweep_task(task):
    alpha, theta, h, n_subdiv, degree, density, solver, cross_check = task
    use_degree = degree if (degree is not None and n_subdiv >= degree) else None
    r = compute_bound_report(alpha, theta, h, n_subdiv, fit_degree=use_degree,
                             sample_density=density, solver=solver,
                             cross_check=cross_check)
    return r.cl_lower, r.cl_upper


def cmd_sweep(args) -> int:
    full = args.full_precision
    degree = args.degree
    if degree is None and not args.no_lower:
        degree = default_degree(args.theta)
    tasks = [(args.alpha, args.theta, args.h, n, None if args.no_lower else degree,
              args.sample_density, args.solver, not args.no_cross_check)
             for n in args.N]
    results = _parallel_map(_sweep_task, tasks, _workers(args))
    lines = ["N,cl_lower,cl_upper"]
    for n, (lo, hi) in zip(args.N, results):
        lines.append(f"{n},{_fmt(lo, full)},{_fmt(hi, full)}")
    _emit(lines, args.output)
    return 0


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--solver", choices=("auto", "lu", "cholesky"), default="auto",
                   help="factorization backend (default: auto)")
    p.add_argument("--no-cross-check", action="store_true",
                   help="skip the geometric-orientation consistency sweep")
    p.add_argument("--full-precision", action="store_true",
                   help="print full float precision instead of 5 significant digits")
    p.add_argument("--output", "-o", help="write to this file instead of stdout")
    p.add_argument("--workers", type=_positive_int, default=None,
                   help="process pool size for grid/sweep commands "
                        "(default: INTERPCONST_WORKERS or CPU count)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="interpconst",
        description="Two-sided bounds for the sup-norm error constant of "
                    "linear interpolation on triangles.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="bounds for a single shape")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--theta", type=parse_theta, default=math.pi / 2,
                   help="angle at the origin vertex ('pi/6', '2pi/3', or radians)")
    p.add_argument("--h", type=float, default=1.0, help="scale (medium edge length)")
    p.add_argument("--N", type=_positive_int, default=32, help="mesh subdivisions per side")
    p.add_argument("--degree", type=_positive_int, default=None,
                   help="certificate fit degree (default keyed to theta)")
    p.add_argument("--no-lower", action="store_true", help="skip the lower-bound certificate")
    p.add_argument("--sample-density", type=_positive_int, default=200,
                   help="barycentric lattice density for the sampled sup")
    p.add_argument("--dump-mesh", metavar="PREFIX",
                   help="also write PREFIX_vertices.csv / PREFIX_elements.csv")
    _add_common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("table1", help="relaxed minima and lambda lower bounds")
    p.add_argument("--N", type=_positive_int, nargs="+", default=[32, 64])
    _add_common(p)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("table2", help="two-sided constant bounds")
    p.add_argument("--N", type=_positive_int, nargs="+", default=[32, 64])
    p.add_argument("--sample-density", type=_positive_int, default=200)
    _add_common(p)
    p.set_defaults(func=cmd_table2)

    p = sub.add_parser("contour", help="upper-bound grid over third-vertex positions")
    p.add_argument("--xmin", type=float, default=-0.5)
    p.add_argument("--xmax", type=float, default=1.5)
    p.add_argument("--ymin", type=float, default=0.1)
    p.add_argument("--ymax", type=float, default=1.5)
    p.add_argument("--nx", type=_positive_int, default=21)
    p.add_argument("--ny", type=_positive_int, default=15)
    p.add_argument("--N", type=_positive_int, default=16)
    _add_common(p)
    p.set_defaults(func=cmd_contour)

    p = sub.add_parser("sweep", help="bound convergence over mesh resolutions")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--theta", type=parse_theta, default=math.pi / 2)
    p.add_argument("--h", type=float, default=1.0)
    p.add_argument("--N", type=_positive_int, nargs="+", default=[8, 16, 32, 64])
    p.add_argument("--degree", type=_positive_int, default=None)
    p.add_argument("--no-lower", action="store_true")
    p.add_argument("--sample-density", type=_positive_int, default=200)
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InterpConstError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
