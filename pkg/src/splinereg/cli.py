"""Command-line surface: generate | fit | sample | metrics | strength.

Exit codes: 0 success, 1 usage error, 2 data/parse error, 3 numeric failure.
The SPLINEREG_THREADS environment variable caps BLAS/solver parallelism.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import datagen
from .analysis import error_vs_function, grid_axes, strength_field
from .exceptions import (
    CapabilityError,
    ConfigError,
    DegenerateDomainError,
    DomainError,
    ModelFormatError,
    RegionError,
    SolverError,
    UnregularizableColumnError,
)
from .fitting import FitConfig, PointCloud, fit
from .modelio import (
    load_model,
    read_cloud_csv,
    read_report,
    save_model,
    write_cloud_csv,
    write_report,
)
from .tensor import TensorSpline

ANALYTIC_FIELDS = {"polysinc": (datagen.polysinc, 2), "pins3d": (datagen.pins3d, 3)}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _ints(text):
    return tuple(int(v) for v in text.split(","))


def _floats(text):
    return tuple(float(v) for v in text.split(","))


def _box_from_flag(text, dim=None):
    vals = _floats(text)
    if len(vals) % 2 or (dim is not None and len(vals) != 2 * dim):
        raise _UsageError(f"--domain/--region needs lo,hi pairs, got {text!r}")
    box = np.asarray(vals, dtype=float).reshape(-1, 2)
    if np.any(box[:, 1] <= box[:, 0]):
        raise _UsageError(f"box {text!r} has empty extent")
    return box


def _build_parser():
    parser = _Parser(prog="splinereg",
                     description="Adaptive-regularization B-spline fitting")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic point-cloud CSV")
    gen.add_argument("--layout", required=True,
                     choices=["uniform", "voids", "quadrant", "hole"])
    gen.add_argument("--points", type=int, default=22500)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--domain", help="lo,hi per dimension (default polysinc box)")
    gen.add_argument("--field", choices=sorted(ANALYTIC_FIELDS), default="polysinc")
    gen.add_argument("--sparsity", type=float, default=1.0,
                     help="in-void acceptance probability (voids layout)")
    gen.add_argument("--void-radius", type=float, default=datagen.DEFAULT_VOID_RADIUS)
    gen.add_argument("--void-centers",
                     help="semicolon-separated x,y centers (voids layout)")
    gen.add_argument("--shares", help="four quadrant count shares (quadrant layout)")
    gen.add_argument("--hole-shape", choices=["disk", "hex"], default="disk")
    gen.add_argument("--hole-radius", type=float, default=np.pi,
                     help="disk hole or hexagon circumradius")
    gen.add_argument("--hole-center", default="0,0")
    gen.add_argument("--out", required=True)

    fitp = sub.add_parser("fit", help="fit a spline model to a point-cloud CSV")
    fitp.add_argument("input")
    fitp.add_argument("--degree", default="3",
                      help="spline degree, one int or per-dimension list")
    fitp.add_argument("--controls", required=True,
                      help="control-grid size per dimension, e.g. 80,80")
    fitp.add_argument("--sstar", type=float, default=1.0)
    fitp.add_argument("--no-first-deriv", action="store_true")
    fitp.add_argument("--no-second-deriv", action="store_true")
    fitp.add_argument("--no-reg", action="store_true",
                      help="disable regularization entirely (same fit as --sstar 0)")
    fitp.add_argument("--solver", choices=["direct", "cg"], default="direct")
    fitp.add_argument("--tol", type=float, default=1e-10)
    fitp.add_argument("--max-iter", type=int)
    fitp.add_argument("--cond", action="store_true",
                      help="also compute the stacked-system condition number")
    fitp.add_argument("--out", required=True, help="model JSON path")
    fitp.add_argument("--report", help="per-column report path")

    samp = sub.add_parser("sample", help="evaluate a model on a regular grid")
    samp.add_argument("model")
    samp.add_argument("--resolution", required=True, help="e.g. 400,400")
    samp.add_argument("--region", help="lo,hi per dimension, inside the model box")
    samp.add_argument("--out", required=True, help="grid CSV path")
    samp.add_argument("--pgm", help="also write a 16-bit PGM preview (2-d only)")

    met = sub.add_parser("metrics", help="L2/Linf errors against a reference")
    met.add_argument("model")
    met.add_argument("--reference", required=True,
                     help="analytic field name or a point-cloud CSV path")
    met.add_argument("--resolution", default="400,400")
    met.add_argument("--region", help="restrict errors to this box")

    stren = sub.add_parser("strength", help="sample a regularization-strength field")
    stren.add_argument("model")
    stren.add_argument("report")
    stren.add_argument("--order", type=int, choices=[1, 2], default=2)
    stren.add_argument("--resolution", default="400,400")
    stren.add_argument("--out", required=True)
    stren.add_argument("--pgm")
    return parser


def _default_domain(args, dim):
    if args.domain:
        return _box_from_flag(args.domain)
    if dim != 2:
        raise _UsageError("--domain is required for non-2d layouts")
    return np.asarray(datagen.POLYSINC_BOX)


def _cmd_generate(args):
    field, field_dim = ANALYTIC_FIELDS[args.field]
    box = _default_domain(args, field_dim)
    if box.shape[0] != field_dim:
        raise _UsageError(f"field {args.field} is {field_dim}-dimensional")
    common = dict(domain=box, seed=args.seed, field=field)
    if args.layout == "uniform":
        cloud = datagen.sample_uniform(args.points, **common)
    elif args.layout == "voids":
        centers = datagen.DEFAULT_VOID_CENTERS
        if args.void_centers:
            centers = [tuple(float(v) for v in part.split(","))
                       for part in args.void_centers.split(";")]
        cloud = datagen.sample_voids(args.points, sparsity=args.sparsity,
                                     centers=centers, radius=args.void_radius,
                                     **common)
    elif args.layout == "quadrant":
        shares = (_floats(args.shares) if args.shares
                  else datagen.DEFAULT_QUADRANT_SHARES)
        cloud = datagen.sample_quadrant_gradient(args.points, shares=shares,
                                                 **common)
    else:
        center = _floats(args.hole_center)
        if args.hole_shape == "disk":
            mask = datagen.disk_mask(center, args.hole_radius)
        else:
            mask = datagen.outside_hexagon_mask(args.hole_radius, center)
        cloud = datagen.sample_with_hole(args.points, mask=mask, **common)
    write_cloud_csv(args.out, cloud)
    bbox = cloud.bounding_box()
    bounds = " ".join(f"[{lo:g}, {hi:g}]" for lo, hi in bbox)
    print(f"wrote {cloud.n_points} points to {args.out}")
    print(f"bounding box: {bounds}")
    return 0


def _cmd_fit(args):
    cloud = read_cloud_csv(args.input)
    d = cloud.domain_dim
    degrees = _ints(args.degree)
    if len(degrees) == 1:
        degrees = degrees * d
    controls = _ints(args.controls)
    if len(controls) != d or len(degrees) != d:
        raise _UsageError(
            f"--degree/--controls must match the {d}-dimensional input")
    use_first = not (args.no_first_deriv or args.no_reg)
    use_second = not (args.no_second_deriv or args.no_reg)
    config = FitConfig(
        degrees=degrees, control_dims=controls, s_star=args.sstar,
        use_first_deriv=use_first, use_second_deriv=use_second,
        solver="normal-direct" if args.solver == "direct" else "normal-iterative",
        iterative_tol=args.tol, iterative_max_iter=args.max_iter,
        compute_condition=args.cond)
    try:
        model, report = fit(cloud, config)
    except SolverError as exc:
        worst = getattr(exc, "worst_column", None)
        if worst is not None:
            print(f"error: {exc} (worst column {worst}, stacked sum "
                  f"{getattr(exc, 'worst_column_sum', float('nan')):.3e})",
                  file=sys.stderr)
            return 3
        raise
    save_model(args.out, model)
    print(f"wrote model to {args.out}")
    print(f"residual_l2={report.residual_l2!r}")
    if report.stacked_condition is not None:
        cond = report.stacked_condition
        print(f"stacked_condition={'inf' if math.isinf(cond) else repr(cond)}")
    if args.report:
        write_report(args.report, report)
        print(f"wrote report to {args.report}")
    return 0


def _write_grid_csv(path, coords, values):
    cloud = PointCloud(coords, values)
    write_cloud_csv(path, cloud)


def _write_pgm(path, grid):
    """16-bit binary PGM normalized to the grid's value range."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 2:
        raise CapabilityError("PGM output needs a 2-d single-channel grid")
    lo, hi = float(grid.min()), float(grid.max())
    if hi > lo:
        levels = np.round((grid - lo) / (hi - lo) * 65535.0).astype(">u2")
    else:
        levels = np.zeros(grid.shape, dtype=">u2")
    with open(path, "wb") as fh:
        fh.write(f"P5\n{grid.shape[1]} {grid.shape[0]}\n65535\n".encode("ascii"))
        fh.write(levels.tobytes())


def _cmd_sample(args):
    model = load_model(args.model)
    res = _ints(args.resolution)
    if len(res) == 1:
        res = res * model.domain_dim
    if args.region:
        region = _box_from_flag(args.region, model.domain_dim)
        axes = grid_axes(region, res)
        mesh = np.meshgrid(*axes, indexing="ij")
        coords = np.column_stack([m.ravel() for m in mesh])
        values = model.eval_many(model.param_from_physical(coords))
    else:
        axes = [np.linspace(0.0, 1.0, r) for r in res]
        mesh = np.meshgrid(*axes, indexing="ij")
        params = np.column_stack([m.ravel() for m in mesh])
        coords = model.physical_from_param(params)
        values = model.eval_many(params)
    _write_grid_csv(args.out, coords, values)
    print(f"wrote {values.shape[0]} grid rows to {args.out}")
    if args.pgm:
        if model.domain_dim != 2 or model.value_dim != 1:
            raise CapabilityError("PGM preview needs a 2-d scalar model")
        _write_pgm(args.pgm, values[:, 0].reshape(res))
        print(f"wrote PGM preview to {args.pgm}")
    return 0


def _print_summary(summary):
    print(f"l2={summary.l2!r}")
    print(f"linf={summary.linf!r}")
    print(f"count={summary.count}")
    if summary.region is not None:
        print("region=" + ",".join(repr(float(v)) for v in summary.region.ravel()))
    else:
        print("region=full")


def _cmd_metrics(args):
    model = load_model(args.model)
    region = _box_from_flag(args.region, model.domain_dim) if args.region else None
    if args.reference in ANALYTIC_FIELDS:
        field, field_dim = ANALYTIC_FIELDS[args.reference]
        if field_dim != model.domain_dim:
            raise _UsageError(f"reference {args.reference} is {field_dim}-dimensional")
        res = _ints(args.resolution)
        if len(res) == 1:
            res = res * model.domain_dim
        summary = error_vs_function(model, field, res, region=region)
    elif os.path.exists(args.reference):
        cloud = read_cloud_csv(args.reference)
        coords, values = cloud.coords, cloud.values
        if region is not None:
            inside = np.all((coords >= region[:, 0]) & (coords <= region[:, 1]),
                            axis=1)
            if not np.any(inside):
                raise RegionError("region contains no reference points")
            coords, values = coords[inside], values[inside]
        err = np.linalg.norm(
            model.eval_many(model.param_from_physical(coords)) - values, axis=1)
        from .analysis import ErrorSummary
        summary = ErrorSummary(l2=float(np.sqrt(np.mean(err ** 2))),
                               linf=float(err.max()), count=int(err.size),
                               region=region)
    else:
        raise _UsageError(f"unknown reference {args.reference!r} "
                          f"(not an analytic name or an existing CSV)")
    _print_summary(summary)
    return 0


def _cmd_strength(args):
    model = load_model(args.model)
    report = read_report(args.report)
    res = _ints(args.resolution)
    if len(res) == 1:
        res = res * model.domain_dim
    fld = strength_field(model, report, args.order, res)
    axes = [np.linspace(0.0, 1.0, r) for r in res]
    mesh = np.meshgrid(*axes, indexing="ij")
    params = np.column_stack([m.ravel() for m in mesh])
    coords = model.physical_from_param(params)
    _write_grid_csv(args.out, coords, fld.values.reshape(-1, 1))
    print(f"wrote strength field (order {args.order}) to {args.out}")
    if args.pgm:
        if model.domain_dim != 2:
            raise CapabilityError("PGM preview needs a 2-d model")
        _write_pgm(args.pgm, fld.values)
        print(f"wrote PGM preview to {args.pgm}")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "fit": _cmd_fit,
    "sample": _cmd_sample,
    "metrics": _cmd_metrics,
    "strength": _cmd_strength,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    threads = os.environ.get("SPLINEREG_THREADS")
    try:
        if threads:
            from threadpoolctl import threadpool_limits
            with threadpool_limits(limits=int(threads)):
                return _COMMANDS[args.command](args)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ModelFormatError, DegenerateDomainError, DomainError, RegionError,
            FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, UnregularizableColumnError, CapabilityError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
