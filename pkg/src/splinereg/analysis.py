"""Model quality metrics, condition numbers, and regularization-strength fields."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .exceptions import CapabilityError, RegionError
from .tensor import TensorSpline

__all__ = [
    "ErrorSummary",
    "StrengthField",
    "grid_axes",
    "grid_lattice",
    "grid_sample",
    "error_vs_function",
    "condition_number",
    "strength_field",
]

# Columns above this use iterative extremal singular-value estimates.
DENSE_SVD_MAX_COLS = 2000
# sigma_min below this fraction of sigma_max reports an infinite condition.
_SINGULAR_RTOL = 1e-13


@dataclass(frozen=True)
class ErrorSummary:
    """Root-mean-square and maximum pointwise error over a lattice region."""

    l2: float
    linf: float
    count: int
    region: np.ndarray | None = None


@dataclass(frozen=True)
class StrengthField:
    """Regularization strength sampled on a regular lattice."""

    order: int
    resolution: tuple[int, ...]
    values: np.ndarray = field(repr=False)


def _check_resolution(resolution, d):
    res = tuple(int(r) for r in np.atleast_1d(resolution))
    if len(res) == 1 and d > 1:
        res = res * d
    if len(res) != d or any(r < 2 for r in res):
        raise ValueError(f"resolution must be >= 2 per dimension, got {resolution}")
    return res


def grid_axes(domain_box, resolution):
    """Per-dimension physical lattice coordinates, endpoints included."""
    box = np.asarray(domain_box, dtype=float)
    res = _check_resolution(resolution, box.shape[0])
    return [np.linspace(lo, hi, r) for (lo, hi), r in zip(box, res)]


def grid_lattice(domain_box, resolution):
    """Flattened lattice points in row-major lexicographic order, shape (N, d)."""
    axes = grid_axes(domain_box, resolution)
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.ravel() for m in mesh])


def _param_lattice(d, resolution):
    axes = [np.linspace(0.0, 1.0, r) for r in resolution]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.ravel() for m in mesh])


def grid_sample(model: TensorSpline, resolution) -> np.ndarray:
    """Model values on a regular lattice over the domain box.

    Returns an array of shape ``(*resolution, value_dim)`` whose C-order
    flattening matches the row-major lexicographic lattice ordering. Values
    are produced by the same evaluation kernel as :meth:`TensorSpline.eval`.
    """
    res = _check_resolution(resolution, model.domain_dim)
    params = _param_lattice(model.domain_dim, res)
    values = model.eval_many(params)
    return values.reshape(*res, model.value_dim)


def error_vs_function(model: TensorSpline, f, resolution, region=None) -> ErrorSummary:
    """Lattice L2 (RMS) and Linf error of the model against an analytic field.

    The lattice always spans the full domain box; ``region`` restricts the
    summary to lattice points inside the closed sub-box.
    """
    res = _check_resolution(resolution, model.domain_dim)
    params = _param_lattice(model.domain_dim, res)
    coords = model.physical_from_param(params)
    if region is not None:
        region = np.asarray(region, dtype=float)
        inside = np.all((coords >= region[:, 0]) & (coords <= region[:, 1]), axis=1)
        if not np.any(inside):
            raise RegionError("region contains no lattice points")
        params = params[inside]
        coords = coords[inside]
    predicted = model.eval_many(params)
    truth = np.asarray(f(*(coords[:, k] for k in range(coords.shape[1]))),
                       dtype=float)
    if truth.ndim == 1:
        truth = truth[:, None]
    err = np.linalg.norm(predicted - truth, axis=1)
    return ErrorSummary(l2=float(np.sqrt(np.mean(err ** 2))),
                        linf=float(err.max()), count=int(err.size),
                        region=region)


def _iterative_extremes(A, tol):
    sigma_max = float(spla.svds(A, k=1, which="LM", tol=tol,
                                return_singular_vectors=False)[0])
    G = (A.T @ A).tocsc()
    try:
        lam_min = spla.eigsh(G, k=1, sigma=0.0, which="LM", tol=tol,
                             return_eigenvectors=False)[0]
    except (RuntimeError, ValueError):
        # Shift-invert factorization fails only when G is numerically singular.
        return sigma_max, 0.0
    return sigma_max, math.sqrt(max(float(lam_min), 0.0))


def condition_number(A, method: str = "auto", tol: float = 1e-3) -> float:
    """Extremal singular-value ratio of a (stacked) rectangular matrix.

    Uses an exact dense SVD up to ``DENSE_SVD_MAX_COLS`` columns and iterative
    extremal estimates (relative tolerance ``tol``) beyond that. Returns
    ``math.inf`` when sigma_min drops below 1e-13 of sigma_max.
    """
    n_cols = A.shape[1]
    if method == "auto":
        method = "dense" if n_cols <= DENSE_SVD_MAX_COLS else "iterative"
    if method == "dense":
        if n_cols > DENSE_SVD_MAX_COLS:
            raise CapabilityError(
                f"dense SVD limited to {DENSE_SVD_MAX_COLS} columns, got {n_cols}")
        dense = A.toarray() if sp.issparse(A) else np.asarray(A, dtype=float)
        if not np.any(dense):
            raise ValueError("condition number of a zero matrix")
        sigma = scipy.linalg.svd(dense, compute_uv=False, overwrite_a=True)
        s_max, s_min = float(sigma[0]), float(sigma[-1])
    elif method == "iterative":
        A = sp.csr_matrix(A)
        if A.nnz == 0:
            raise ValueError("condition number of a zero matrix")
        s_max, s_min = _iterative_extremes(A, tol)
    else:
        raise ValueError(f"unknown method {method!r}")
    if s_min < _SINGULAR_RTOL * s_max:
        return math.inf
    return s_max / s_min


def strength_field(model: TensorSpline, report, order: int, resolution) -> StrengthField:
    """Spatial regularization strength: sum_j lambda_j N_j(u) on a lattice.

    The field inherits the local-support property, so it is exactly zero
    wherever every active basis carries zero strength.
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    lam = np.asarray(report.lambda1 if order == 1 else report.lambda2, dtype=float)
    if lam.size != model.control_points.shape[0]:
        raise ValueError("report and model sizes disagree")
    res = _check_resolution(resolution, model.domain_dim)
    carrier = TensorSpline(model.knot_vectors, lam[:, None], model.domain_box)
    values = carrier.eval_many(_param_lattice(model.domain_dim, res))
    return StrengthField(order=order, resolution=res,
                         values=values.reshape(res))
