"""Multi-index bookkeeping and tensor-product B-spline models."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .basis import KnotVector, _basis_derivative_values, _basis_values, _find_spans
from .exceptions import DerivativeOrderError, DomainError

__all__ = ["MultiIndexSpace", "TensorSpline"]


@dataclass(frozen=True)
class MultiIndexSpace:
    """Lexicographic ordering of multi-indices over a box of dimensions."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        if not dims or any(n < 1 for n in dims):
            raise ValueError(f"dims must be positive, got {self.dims}")
        object.__setattr__(self, "dims", dims)
        strides = []
        acc = 1
        for n in reversed(dims):
            strides.append(acc)
            acc *= n
        object.__setattr__(self, "_strides", tuple(reversed(strides)))

    @property
    def size(self) -> int:
        return int(np.prod(self.dims))

    def lex_index(self, alpha) -> int:
        """Position of multi-index ``alpha`` in lexicographic order."""
        if len(alpha) != len(self.dims):
            raise IndexError(f"expected {len(self.dims)} components, got {len(alpha)}")
        idx = 0
        for a, n, stride in zip(alpha, self.dims, self._strides):
            if not 0 <= a < n:
                raise IndexError(f"component {a} out of range [0, {n})")
            idx += int(a) * stride
        return idx

    def unlex(self, index: int) -> tuple[int, ...]:
        """Multi-index at lexicographic position ``index``."""
        if not 0 <= index < self.size:
            raise IndexError(f"index {index} out of range [0, {self.size})")
        out = []
        for stride in self._strides:
            out.append(index // stride)
            index %= stride
        return tuple(out)


def _check_point_array(U, d):
    U = np.asarray(U, dtype=float)
    if U.ndim == 1:
        U = U[None, :]
    if U.ndim != 2 or U.shape[1] != d:
        raise ValueError(f"expected points of dimension {d}, got shape {U.shape}")
    if np.any(U < 0.0) or np.any(U > 1.0):
        raise DomainError("parameter point outside the unit cube")
    return U


def active_tensor_products(kvs, U, derivs=None):
    """Active tensor-basis columns and weights at each parameter point.

    For every row of ``U`` returns the lexicographic column indices of the
    prod(p_k + 1) active tensor-product bases and the corresponding basis
    (or basis-derivative, per ``derivs``) products. This single kernel backs
    point evaluation, grid sampling, and collocation assembly so they agree
    bit for bit.
    """
    d = len(kvs)
    m = U.shape[0]
    dims = tuple(kv.basis_count for kv in kvs)
    strides = MultiIndexSpace(dims)._strides
    per_dim_vals = []
    per_dim_first = []
    for k, kv in enumerate(kvs):
        u = np.ascontiguousarray(U[:, k])
        spans = _find_spans(kv, u)
        if derivs is None or derivs[k] == 0:
            # Row 0 of the derivative triangle is arithmetically identical,
            # but the plain triangle avoids the extra work.
            vals = _basis_values(kv, u, spans)
        else:
            vals = _basis_derivative_values(kv, u, spans, derivs[k])[:, derivs[k], :]
        per_dim_vals.append(vals)
        per_dim_first.append(spans - kv.degree)

    n_active = int(np.prod([kv.degree + 1 for kv in kvs]))
    cols = np.empty((m, n_active), dtype=np.int64)
    weights = np.empty((m, n_active))
    for pos, offsets in enumerate(itertools.product(*(range(kv.degree + 1) for kv in kvs))):
        w = per_dim_vals[0][:, offsets[0]].copy()
        col = (per_dim_first[0] + offsets[0]) * strides[0]
        for k in range(1, d):
            w *= per_dim_vals[k][:, offsets[k]]
            col = col + (per_dim_first[k] + offsets[k]) * strides[k]
        cols[:, pos] = col
        weights[:, pos] = w
    return cols, weights


@dataclass(frozen=True)
class TensorSpline:
    """Tensor-product B-spline field over a box, with vector values.

    Control points are stored as an (n_tot, s) matrix in lexicographic row
    order; ``domain_box`` maps the parameter cube [0,1]^d onto the physical
    box the model was fit on.
    """

    knot_vectors: tuple[KnotVector, ...]
    control_points: np.ndarray = field(repr=False)
    domain_box: np.ndarray = field(repr=False)

    def __post_init__(self):
        kvs = tuple(self.knot_vectors)
        object.__setattr__(self, "knot_vectors", kvs)
        P = np.ascontiguousarray(self.control_points, dtype=float)
        if P.ndim == 1:
            P = P[:, None]
        box = np.ascontiguousarray(self.domain_box, dtype=float)
        n_tot = int(np.prod([kv.basis_count for kv in kvs]))
        if P.shape[0] != n_tot:
            raise ValueError(f"expected {n_tot} control points, got {P.shape[0]}")
        if not np.all(np.isfinite(P)):
            raise ValueError("control points must be finite")
        if box.shape != (len(kvs), 2):
            raise ValueError(f"domain_box must have shape ({len(kvs)}, 2)")
        if np.any(box[:, 1] <= box[:, 0]):
            raise ValueError("domain_box must have positive widths")
        P.flags.writeable = False
        box.flags.writeable = False
        object.__setattr__(self, "control_points", P)
        object.__setattr__(self, "domain_box", box)

    @property
    def domain_dim(self) -> int:
        return len(self.knot_vectors)

    @property
    def value_dim(self) -> int:
        return self.control_points.shape[1]

    @property
    def control_dims(self) -> tuple[int, ...]:
        return tuple(kv.basis_count for kv in self.knot_vectors)

    @property
    def index_space(self) -> MultiIndexSpace:
        return MultiIndexSpace(self.control_dims)

    def eval_many(self, U) -> np.ndarray:
        """Model values at parameter points U, shape (m, d) -> (m, s)."""
        U = _check_point_array(U, self.domain_dim)
        cols, weights = active_tensor_products(self.knot_vectors, U)
        out = np.zeros((U.shape[0], self.value_dim))
        for pos in range(cols.shape[1]):
            out += weights[:, pos, None] * self.control_points[cols[:, pos]]
        return out

    def eval(self, u) -> np.ndarray:
        """Model value at a single parameter point in [0,1]^d."""
        return self.eval_many(np.asarray(u, dtype=float)[None, :])[0]

    def eval_partial_many(self, U, delta) -> np.ndarray:
        """Physical-space mixed partial of order ``delta`` at parameter points.

        Derivatives are taken per dimension in parameter space and rescaled by
        the domain-box widths, so the result is the derivative with respect to
        the physical coordinates. An all-zero ``delta`` reproduces eval_many.
        """
        delta = tuple(int(q) for q in delta)
        if len(delta) != self.domain_dim or any(q < 0 for q in delta):
            raise ValueError(f"bad derivative multi-index {delta}")
        for kv, q in zip(self.knot_vectors, delta):
            if q > kv.degree:
                raise DerivativeOrderError(
                    f"derivative order {q} exceeds degree {kv.degree}")
        U = _check_point_array(U, self.domain_dim)
        cols, weights = active_tensor_products(self.knot_vectors, U, derivs=delta)
        out = np.zeros((U.shape[0], self.value_dim))
        for pos in range(cols.shape[1]):
            out += weights[:, pos, None] * self.control_points[cols[:, pos]]
        widths = self.domain_box[:, 1] - self.domain_box[:, 0]
        scale = np.prod(widths ** np.asarray(delta, dtype=float))
        if scale != 1.0:
            out /= scale
        return out

    def eval_partial(self, u, delta) -> np.ndarray:
        return self.eval_partial_many(np.asarray(u, dtype=float)[None, :], delta)[0]

    def param_from_physical(self, X, tol: float = 1e-9) -> np.ndarray:
        """Map physical coordinates into [0,1]^d, snapping boundary round-off."""
        X = np.asarray(X, dtype=float)
        squeeze = X.ndim == 1
        if squeeze:
            X = X[None, :]
        lo = self.domain_box[:, 0]
        width = self.domain_box[:, 1] - self.domain_box[:, 0]
        U = (X - lo) / width
        if np.any(U < -tol) or np.any(U > 1.0 + tol):
            raise DomainError("physical point outside the model domain box")
        U = np.clip(U, 0.0, 1.0)
        return U[0] if squeeze else U

    def physical_from_param(self, U) -> np.ndarray:
        U = np.asarray(U, dtype=float)
        lo = self.domain_box[:, 0]
        width = self.domain_box[:, 1] - self.domain_box[:, 0]
        return lo + U * width
