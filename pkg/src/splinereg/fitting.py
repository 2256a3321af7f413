"""Penalized least-squares fitting of tensor-product splines to scattered points.

The fit minimizes the data misfit plus first/second-derivative penalties whose
per-control-point strengths adapt to the local data density: a control point
whose collocation column sum falls below the regularization threshold receives
exactly enough curvature penalty to top the stacked column sum back up to the
threshold, and gradient penalties switch on only where no data constrains the
control point at all.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .basis import (
    KnotVector,
    _basis_derivative_values,
    _basis_values,
    _find_spans,
    anchor_params,
    uniform_knots,
)
from .exceptions import (
    ConfigError,
    DegenerateDomainError,
    DerivativeOrderError,
    RankDeficiencyError,
    SolverError,
    UnregularizableColumnError,
)
from .tensor import TensorSpline, active_tensor_products

__all__ = [
    "PointCloud",
    "FitConfig",
    "DesignMatrices",
    "FitReport",
    "parameterize",
    "unparameterize",
    "assemble_collocation",
    "assemble_derivative_block",
    "derivative_multi_indices",
    "lambda1",
    "lambda2",
    "solve",
    "fit",
]

# Relative pivot ratio below which a direct factorization is declared singular.
_PIVOT_RTOL = 1e-14


@dataclass(frozen=True)
class PointCloud:
    """Scattered samples: physical coordinates plus one value vector each."""

    coords: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        coords = np.ascontiguousarray(self.coords, dtype=float)
        values = np.ascontiguousarray(self.values, dtype=float)
        if coords.ndim == 1:
            coords = coords[:, None]
        if values.ndim == 1:
            values = values[:, None]
        if coords.ndim != 2 or values.ndim != 2:
            raise ValueError("coords and values must be 2-d arrays")
        if coords.shape[0] != values.shape[0]:
            raise ValueError("coords and values must have matching row counts")
        if coords.shape[0] < 1:
            raise ValueError("point cloud is empty")
        if not (np.all(np.isfinite(coords)) and np.all(np.isfinite(values))):
            raise ValueError("point cloud entries must be finite")
        coords.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "values", values)

    @property
    def n_points(self) -> int:
        return self.coords.shape[0]

    @property
    def domain_dim(self) -> int:
        return self.coords.shape[1]

    @property
    def value_dim(self) -> int:
        return self.values.shape[1]

    def bounding_box(self) -> np.ndarray:
        return np.column_stack([self.coords.min(axis=0), self.coords.max(axis=0)])


@dataclass(frozen=True)
class FitConfig:
    """Degrees, control-grid size and regularization settings for one fit."""

    degrees: tuple[int, ...]
    control_dims: tuple[int, ...]
    s_star: float = 1.0
    use_second_deriv: bool = True
    use_first_deriv: bool = True
    solver: str = "normal-direct"
    iterative_tol: float = 1e-10
    iterative_max_iter: int | None = None
    compute_condition: bool = False
    # Diagnostic only: overrides every lambda2 entry with one constant to
    # compare against classic uniform smoothing.
    uniform_lambda2: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(int(p) for p in self.degrees))
        object.__setattr__(self, "control_dims",
                           tuple(int(n) for n in self.control_dims))
        if len(self.degrees) != len(self.control_dims):
            raise ConfigError("degrees and control_dims must have equal length")
        for p, n in zip(self.degrees, self.control_dims):
            if p < 1:
                raise ConfigError(f"degree must be >= 1, got {p}")
            if n < p + 1:
                raise ConfigError(f"control count {n} below degree + 1 = {p + 1}")
        if self.s_star < 0:
            raise ConfigError(f"s_star must be >= 0, got {self.s_star}")
        if self.solver not in ("normal-direct", "normal-iterative"):
            raise ConfigError(f"unknown solver {self.solver!r}")
        if self.use_second_deriv and min(self.degrees) < 2:
            raise ConfigError("second-derivative regularization requires degree >= 2")


@dataclass(frozen=True)
class DesignMatrices:
    """Collocation and derivative-penalty matrices plus their column sums."""

    N: sp.csr_matrix
    M2: sp.csr_matrix | None
    M1: sp.csr_matrix | None
    col_sums_N: np.ndarray
    col_abs_sums_M2: np.ndarray | None
    col_abs_sums_M1: np.ndarray | None


@dataclass(frozen=True)
class FitReport:
    """Per-control-point regularization data and solver diagnostics."""

    lambda1: np.ndarray
    lambda2: np.ndarray
    col_sums: np.ndarray
    stilde1: np.ndarray
    stilde2: np.ndarray
    residual_l2: float
    stacked_condition: float | None
    solver_iterations: int


def parameterize(cloud: PointCloud):
    """Affine per-dimension map of the cloud onto the unit cube.

    Returns the (m, d) parameters and the (d, 2) domain box; the box min maps
    to 0 and the max to 1 in every dimension.
    """
    box = cloud.bounding_box()
    widths = box[:, 1] - box[:, 0]
    if np.any(widths <= 0):
        k = int(np.argmin(widths))
        raise DegenerateDomainError(
            f"dimension {k} has zero width; cannot parameterize")
    return (cloud.coords - box[:, 0]) / widths, box


def unparameterize(params, domain_box):
    """Inverse of :func:`parameterize` given the domain box."""
    box = np.asarray(domain_box, dtype=float)
    return box[:, 0] + np.asarray(params) * (box[:, 1] - box[:, 0])


def assemble_collocation(kvs, params) -> sp.csr_matrix:
    """Sparse collocation matrix: row i holds the tensor basis values at v_i."""
    params = np.asarray(params, dtype=float)
    if params.ndim == 1:
        params = params[:, None]
    m = params.shape[0]
    n_tot = int(np.prod([kv.basis_count for kv in kvs]))
    cols, weights = active_tensor_products(kvs, params)
    rows = np.repeat(np.arange(m), cols.shape[1])
    N = sp.coo_matrix((weights.ravel(), (rows, cols.ravel())), shape=(m, n_tot))
    return N.tocsr()


def derivative_multi_indices(d: int, order: int):
    """All derivative multi-indices of the given total order, one per mix.

    Enumeration is in decreasing lexicographic order, e.g. order 2 in 2-d
    yields (2,0), (1,1), (0,2).
    """
    if d == 1:
        return [(order,)]
    out = []
    for first in range(order, -1, -1):
        for rest in derivative_multi_indices(d - 1, order - first):
            out.append((first,) + rest)
    return out


def _univariate_collocation(kv: KnotVector, points, deriv: int) -> sp.csr_matrix:
    """1-d (derivative) collocation matrix at the given parameters."""
    pts = np.asarray(points, dtype=float)
    spans = _find_spans(kv, pts)
    if deriv == 0:
        vals = _basis_values(kv, pts, spans)
    else:
        vals = _basis_derivative_values(kv, pts, spans, deriv)[:, deriv, :]
    p = kv.degree
    rows = np.repeat(np.arange(pts.size), p + 1)
    cols = (spans[:, None] - p + np.arange(p + 1)[None, :]).ravel()
    mat = sp.coo_matrix((vals.ravel(), (rows, cols)),
                        shape=(pts.size, kv.basis_count))
    return mat.tocsr()


def assemble_derivative_block(kvs, anchors, delta) -> sp.csr_matrix:
    """Penalty block for one derivative multi-index, sampled at the anchors.

    Entry (i, j) is the ``delta`` mixed partial of tensor basis j evaluated at
    anchor point i; because the anchors form a tensor grid the block is the
    Kronecker product of per-dimension derivative collocation matrices.
    """
    delta = tuple(int(q) for q in delta)
    if sum(delta) not in (1, 2):
        raise ValueError(f"penalty blocks take |delta| in {{1, 2}}, got {delta}")
    for kv, q in zip(kvs, delta):
        if q > kv.degree:
            raise DerivativeOrderError(
                f"derivative order {q} exceeds degree {kv.degree}")
    block = None
    for kv, w, q in zip(kvs, anchors, delta):
        factor = _univariate_collocation(kv, w, q)
        block = factor if block is None else sp.kron(block, factor, format="csr")
    return block.tocsr()


def _stack_penalty(kvs, anchors, order) -> sp.csr_matrix:
    blocks = [assemble_derivative_block(kvs, anchors, delta)
              for delta in derivative_multi_indices(len(kvs), order)]
    return sp.vstack(blocks, format="csr")


def _abs_col_sums(mat: sp.spmatrix) -> np.ndarray:
    return np.asarray(abs(mat).sum(axis=0)).ravel()


def lambda2(s_star: float, col_sums, abs_col_sums) -> np.ndarray:
    """Second-derivative strengths: max(s* - s_j, 0) / s~_j per column.

    Guarantees that every stacked column sum s_j + lambda_j * s~_j equals
    max(s_j, s*), so no column sum falls below the threshold.
    """
    s = np.asarray(col_sums, dtype=float)
    st = np.asarray(abs_col_sums, dtype=float)
    deficit = np.maximum(s_star - s, 0.0)
    out = np.zeros_like(s)
    need = deficit > 0
    bad = need & (st == 0)
    if np.any(bad):
        raise UnregularizableColumnError(int(np.flatnonzero(bad)[0]))
    out[need] = deficit[need] / st[need]
    return out


def lambda1(s_star: float, col_sums, abs_col_sums) -> np.ndarray:
    """First-derivative strengths: s*/s~_j on data-free columns, else zero."""
    s = np.asarray(col_sums, dtype=float)
    st = np.asarray(abs_col_sums, dtype=float)
    out = np.zeros_like(s)
    empty = s == 0
    if s_star > 0:
        bad = empty & (st == 0)
        if np.any(bad):
            raise UnregularizableColumnError(int(np.flatnonzero(bad)[0]))
        out[empty] = s_star / st[empty]
    return out


def _scaled_blocks(mats: DesignMatrices, lam1, lam2):
    """Penalty blocks with their column scalings applied; zero blocks dropped."""
    blocks = []
    if mats.M2 is not None and lam2 is not None and np.any(lam2 != 0.0):
        blocks.append(mats.M2 @ sp.diags(lam2))
    if mats.M1 is not None and lam1 is not None and np.any(lam1 != 0.0):
        blocks.append(mats.M1 @ sp.diags(lam1))
    return blocks


def stacked_system(mats: DesignMatrices, lam1, lam2) -> sp.csr_matrix:
    """The data block stacked on top of the scaled penalty blocks."""
    return sp.vstack([mats.N] + _scaled_blocks(mats, lam1, lam2), format="csr")


def _solve_direct(G: sp.csc_matrix, rhs: np.ndarray) -> np.ndarray:
    try:
        lu = spla.splu(G)
    except RuntimeError as exc:  # raised for exactly singular factors
        raise RankDeficiencyError() from exc
    pivots = np.abs(lu.U.diagonal())
    if pivots.min() < _PIVOT_RTOL * pivots.max():
        raise RankDeficiencyError()
    P = lu.solve(rhs)
    if not np.all(np.isfinite(P)):
        raise RankDeficiencyError()
    return P


def solve(mats: DesignMatrices, lam1, lam2, Q, *, solver: str = "normal-direct",
          tol: float = 1e-10, max_iter: int | None = None):
    """Solve the penalized least-squares system for the control points.

    Minimizes ``|N P - Q|^2 + |M2 L2 P|^2 + |M1 L1 P|^2`` where the diagonal
    strength matrices scale penalty columns. The direct solver factorizes the
    normal matrix; the iterative solver runs conjugate-gradient-type LSMR
    iterations on the stacked system, which applies the same normal equations
    without squaring their conditioning.

    Returns the (n_tot, s) control-point matrix and the iteration count.
    """
    Q = np.asarray(Q, dtype=float)
    if Q.ndim == 1:
        Q = Q[:, None]
    rhs = mats.N.T @ Q
    if solver == "normal-direct":
        G = (mats.N.T @ mats.N).tocsc()
        for block in _scaled_blocks(mats, lam1, lam2):
            G = G + (block.T @ block).tocsc()
        return _solve_direct(G, rhs), 0
    if solver != "normal-iterative":
        raise ConfigError(f"unknown solver {solver!r}")

    A = stacked_system(mats, lam1, lam2)
    n_tot = A.shape[1]
    b = np.zeros(A.shape[0])
    P = np.empty((n_tot, Q.shape[1]))
    iterations = 0
    maxiter = max_iter if max_iter is not None else max(2 * n_tot, 1000)
    for j in range(Q.shape[1]):
        b[: Q.shape[0]] = Q[:, j]
        x, istop, itn, normr = spla.lsmr(A, b, atol=tol, btol=tol,
                                         conlim=0.0, maxiter=maxiter)[:4]
        if istop == 7:
            raise SolverError(
                f"LSMR did not converge within {maxiter} iterations",
                residual=float(normr))
        P[:, j] = x
        iterations = max(iterations, int(itn))
    if not np.all(np.isfinite(P)):
        raise SolverError("iterative solve produced non-finite control points")
    return P, iterations


def report_stilde(values, n_tot):
    """Penalty column sums with assembled-but-disabled blocks reported as zero."""
    return values if values is not None else np.zeros(n_tot)


def build_design(cloud: PointCloud, config: FitConfig):
    """Knot vectors, parameters and design matrices for one fit."""
    if cloud.domain_dim != len(config.degrees):
        raise ConfigError(
            f"config is {len(config.degrees)}-dimensional but the cloud has "
            f"{cloud.domain_dim} coordinates")
    params, box = parameterize(cloud)
    kvs = tuple(uniform_knots(p, n)
                for p, n in zip(config.degrees, config.control_dims))
    N = assemble_collocation(kvs, params)
    need_anchors = config.use_second_deriv or config.use_first_deriv
    anchors = [anchor_params(kv) for kv in kvs] if need_anchors else None
    M2 = M1 = None
    st2 = st1 = None
    if config.use_second_deriv:
        M2 = _stack_penalty(kvs, anchors, 2)
        st2 = _abs_col_sums(M2)
    if config.use_first_deriv:
        M1 = _stack_penalty(kvs, anchors, 1)
        st1 = _abs_col_sums(M1)
    mats = DesignMatrices(N=N, M2=M2, M1=M1,
                          col_sums_N=np.asarray(N.sum(axis=0)).ravel(),
                          col_abs_sums_M2=st2, col_abs_sums_M1=st1)
    return kvs, params, box, mats


def fit(cloud: PointCloud, config: FitConfig):
    """Fit a tensor-product spline to the cloud with adaptive regularization.

    Returns the fitted :class:`~splinereg.tensor.TensorSpline` together with a
    :class:`FitReport` holding the per-column sums, strengths and solver
    diagnostics.
    """
    kvs, params, box, mats = build_design(cloud, config)
    n_tot = mats.N.shape[1]
    zeros = np.zeros(n_tot)
    s = mats.col_sums_N
    lam2 = zeros
    if config.use_second_deriv:
        lam2 = lambda2(config.s_star, s, mats.col_abs_sums_M2)
        if config.uniform_lambda2 is not None:
            lam2 = np.full(n_tot, float(config.uniform_lambda2))
    lam1 = zeros
    if config.use_first_deriv:
        lam1 = lambda1(config.s_star, s, mats.col_abs_sums_M1)

    try:
        P, iterations = solve(mats, lam1, lam2, cloud.values,
                              solver=config.solver, tol=config.iterative_tol,
                              max_iter=config.iterative_max_iter)
    except SolverError as exc:
        stacked_sums = s + lam2 * report_stilde(mats.col_abs_sums_M2, n_tot) \
            + lam1 * report_stilde(mats.col_abs_sums_M1, n_tot)
        exc.worst_column = int(np.argmin(stacked_sums))
        exc.worst_column_sum = float(stacked_sums[exc.worst_column])
        raise
    residual = float(np.linalg.norm(mats.N @ P - cloud.values))
    condition = None
    if config.compute_condition:
        from .analysis import condition_number
        condition = condition_number(stacked_system(mats, lam1, lam2))
    model = TensorSpline(kvs, P, box)
    report = FitReport(
        lambda1=lam1, lambda2=lam2, col_sums=s,
        stilde1=report_stilde(mats.col_abs_sums_M1, n_tot),
        stilde2=report_stilde(mats.col_abs_sums_M2, n_tot),
        residual_l2=residual, stacked_condition=condition,
        solver_iterations=iterations)
    return model, report
