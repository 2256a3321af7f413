"""File formats: point-cloud CSV, versioned model JSON, and fit reports.

Floats are written with Python's shortest round-trip repr (at most 17
significant digits), so every file reloads to bit-identical values.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .basis import KnotVector
from .exceptions import ModelFormatError
from .fitting import FitReport, PointCloud
from .tensor import TensorSpline

__all__ = [
    "write_cloud_csv",
    "read_cloud_csv",
    "save_model",
    "load_model",
    "write_report",
    "read_report",
]

MODEL_FORMAT = "splinereg-model"
MODEL_VERSION = 1


def write_cloud_csv(path, cloud: PointCloud) -> None:
    """Write `# d=<d> s=<s>` header plus one `x...,v...` row per point."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# d={cloud.domain_dim} s={cloud.value_dim}\n")
        for x, v in zip(cloud.coords, cloud.values):
            fh.write(",".join(repr(float(c)) for c in (*x, *v)) + "\n")


def read_cloud_csv(path) -> PointCloud:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        try:
            parts = dict(item.split("=") for item in header.lstrip("# ").split())
            d, s = int(parts["d"]), int(parts["s"])
        except (ValueError, KeyError) as exc:
            raise ModelFormatError(f"bad point-cloud header {header!r}", line=1) from exc
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if len(fields) != d + s:
                raise ModelFormatError(
                    f"expected {d + s} fields, got {len(fields)}", line=lineno)
            try:
                rows.append([float(f) for f in fields])
            except ValueError as exc:
                raise ModelFormatError(str(exc), line=lineno) from exc
    if not rows:
        raise ModelFormatError("point-cloud file has no data rows")
    data = np.asarray(rows)
    return PointCloud(data[:, :d], data[:, d:])


def save_model(path, model: TensorSpline) -> None:
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "domain_dim": model.domain_dim,
        "value_dim": model.value_dim,
        "degrees": [kv.degree for kv in model.knot_vectors],
        "control_dims": list(model.control_dims),
        "knots": [kv.knots.tolist() for kv in model.knot_vectors],
        "domain_box": model.domain_box.tolist(),
        "control_points": model.control_points.tolist(),
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_model(path) -> TensorSpline:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(exc.msg, line=exc.lineno) from exc
    try:
        if doc["format"] != MODEL_FORMAT:
            raise ModelFormatError(f"not a model file: format={doc['format']!r}")
        if doc["version"] != MODEL_VERSION:
            raise ModelFormatError(f"unsupported model version {doc['version']}")
        kvs = tuple(KnotVector(p, np.asarray(knots))
                    for p, knots in zip(doc["degrees"], doc["knots"]))
        model = TensorSpline(kvs, np.asarray(doc["control_points"]),
                             np.asarray(doc["domain_box"]))
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"bad model document: {exc}") from exc
    if (model.domain_dim != doc["domain_dim"]
            or model.value_dim != doc["value_dim"]
            or list(model.control_dims) != list(doc["control_dims"])):
        raise ModelFormatError("model document is internally inconsistent")
    return model


def _format_cond(value) -> str:
    if value is None:
        return ""
    return "inf" if math.isinf(value) else repr(float(value))


def write_report(path, report: FitReport) -> None:
    """Line-oriented `key=value` header plus a per-column strength table."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"residual_l2={repr(report.residual_l2)}\n")
        fh.write(f"solver_iterations={report.solver_iterations}\n")
        if report.stacked_condition is not None:
            fh.write(f"stacked_condition={_format_cond(report.stacked_condition)}\n")
        fh.write("columns=j,s_j,stilde1_j,stilde2_j,lambda1_j,lambda2_j\n")
        table = zip(report.col_sums, report.stilde1, report.stilde2,
                    report.lambda1, report.lambda2)
        for j, row in enumerate(table):
            fh.write(f"{j}," + ",".join(repr(float(v)) for v in row) + "\n")


def read_report(path) -> FitReport:
    scalars = {}
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if "=" in line and not line[0].isdigit():
                key, value = line.split("=", 1)
                scalars[key] = value
                continue
            fields = line.split(",")
            if len(fields) != 6:
                raise ModelFormatError(
                    f"expected 6 table fields, got {len(fields)}", line=lineno)
            rows.append([float(f) for f in fields[1:]])
    if "residual_l2" not in scalars or not rows:
        raise ModelFormatError("report file is missing required entries")
    table = np.asarray(rows)
    cond = scalars.get("stacked_condition")
    return FitReport(
        lambda1=table[:, 3], lambda2=table[:, 4], col_sums=table[:, 0],
        stilde1=table[:, 1], stilde2=table[:, 2],
        residual_l2=float(scalars["residual_l2"]),
        stacked_condition=None if cond is None else float(cond),
        solver_iterations=int(scalars.get("solver_iterations", 0)))
