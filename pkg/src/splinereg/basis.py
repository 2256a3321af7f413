"""Univariate B-spline basis: knot vectors, Cox-de Boor evaluation, derivatives, anchors.

All bases live on the parameter interval [0, 1] with clamped knot vectors, so
the first and last basis functions interpolate the interval endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DerivativeOrderError, DomainError

__all__ = [
    "KnotVector",
    "uniform_knots",
    "find_span",
    "basis_nonzero",
    "basis_derivatives",
    "greville_abscissae",
    "anchor_params",
]


@dataclass(frozen=True)
class KnotVector:
    """A clamped, nondecreasing knot sequence on [0, 1] with a fixed degree.

    For degree ``p`` and ``n`` basis functions the sequence holds ``n + p + 1``
    knots, the first and last ``p + 1`` of which are pinned to 0 and 1.
    Interior knots may repeat up to ``p`` times, which keeps every basis
    function a continuous single-peak bump.
    """

    degree: int
    knots: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = self.degree
        if p < 1:
            raise ValueError("degree must be >= 1")
        knots = np.ascontiguousarray(self.knots, dtype=float)
        object.__setattr__(self, "knots", knots)
        n = knots.size - p - 1
        if n < p + 1:
            raise ValueError(f"need at least {2 * (p + 1)} knots for degree {p}")
        if np.any(np.diff(knots) < 0):
            raise ValueError("knots must be nondecreasing")
        if np.any(knots[: p + 1] != 0.0) or np.any(knots[n:] != 1.0):
            raise ValueError("knot vector must be clamped to [0, 1]")
        if knots[p + 1] <= 0.0 or knots[n - 1] >= 1.0:
            raise ValueError("end knots must have multiplicity exactly degree + 1")
        interior = knots[p + 1 : n]
        if interior.size:
            _, counts = np.unique(interior, return_counts=True)
            if np.any(counts > p):
                raise ValueError("interior knot multiplicity must be <= degree")
        knots.flags.writeable = False

    @property
    def basis_count(self) -> int:
        return self.knots.size - self.degree - 1

    def support(self, j: int) -> tuple[float, float]:
        """Closed support [t_j, t_{j+p+1}] of basis function ``j``."""
        if not 0 <= j < self.basis_count:
            raise IndexError(f"basis index {j} out of range")
        return float(self.knots[j]), float(self.knots[j + self.degree + 1])


def uniform_knots(degree: int, basis_count: int) -> KnotVector:
    """Clamped knot vector with uniformly spaced interior knots."""
    p, n = degree, basis_count
    if n < p + 1:
        raise ValueError(f"basis_count must be >= degree + 1, got {n}")
    interior = np.linspace(0.0, 1.0, n - p + 1)[1:-1]
    knots = np.concatenate([np.zeros(p + 1), interior, np.ones(p + 1)])
    return KnotVector(p, knots)


def _check_params(u):
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if np.any(u < 0.0) or np.any(u > 1.0):
        bad = u[(u < 0.0) | (u > 1.0)][0]
        raise DomainError(f"parameter {bad} outside [0, 1]")
    return u


def _find_spans(kv: KnotVector, u: np.ndarray) -> np.ndarray:
    # u = 1 closes on the last nonempty span rather than falling off the end.
    spans = np.searchsorted(kv.knots, u, side="right") - 1
    return np.clip(spans, kv.degree, kv.basis_count - 1)


def _basis_values(kv: KnotVector, u: np.ndarray, spans: np.ndarray) -> np.ndarray:
    """Cox-de Boor triangle: values of the p+1 active bases at each u."""
    p = kv.degree
    knots = kv.knots
    m = u.shape[0]
    values = np.empty((m, p + 1))
    values[:, 0] = 1.0
    left = np.empty((m, p + 1))
    right = np.empty((m, p + 1))
    for j in range(1, p + 1):
        left[:, j] = u - knots[spans + 1 - j]
        right[:, j] = knots[spans + j] - u
        saved = np.zeros(m)
        for r in range(j):
            temp = values[:, r] / (right[:, r + 1] + left[:, j - r])
            values[:, r] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        values[:, j] = saved
    return values


def _basis_derivative_values(kv, u, spans, order):
    """Derivative triangle: rows 0..order of derivatives of the active bases.

    Returns an array of shape (m, order + 1, p + 1); row 0 matches
    ``_basis_values`` exactly.
    """
    p = kv.degree
    knots = kv.knots
    m = u.shape[0]
    # ndu holds the basis triangle (upper part) and knot differences (lower).
    ndu = np.empty((p + 1, p + 1, m))
    ndu[0, 0] = 1.0
    left = np.empty((p + 1, m))
    right = np.empty((p + 1, m))
    for j in range(1, p + 1):
        left[j] = u - knots[spans + 1 - j]
        right[j] = knots[spans + j] - u
        saved = np.zeros(m)
        for r in range(j):
            ndu[j, r] = right[r + 1] + left[j - r]
            temp = ndu[r, j - 1] / ndu[j, r]
            ndu[r, j] = saved + right[r + 1] * temp
            saved = left[j - r] * temp
        ndu[j, j] = saved

    ders = np.zeros((m, order + 1, p + 1))
    ders[:, 0, :] = ndu[:, p].T
    a = np.empty((2, p + 1, m))
    for r in range(p + 1):
        s1, s2 = 0, 1
        a[0, 0] = 1.0
        for k in range(1, order + 1):
            d = np.zeros(m)
            rk = r - k
            pk = p - k
            if r >= k:
                a[s2, 0] = a[s1, 0] / ndu[pk + 1, rk]
                d = a[s2, 0] * ndu[rk, pk]
            j1 = 1 if rk >= -1 else -rk
            j2 = k - 1 if r - 1 <= pk else p - r
            for j in range(j1, j2 + 1):
                a[s2, j] = (a[s1, j] - a[s1, j - 1]) / ndu[pk + 1, rk + j]
                d = d + a[s2, j] * ndu[rk + j, pk]
            if r <= pk:
                a[s2, k] = -a[s1, k - 1] / ndu[pk + 1, r]
                d = d + a[s2, k] * ndu[r, pk]
            ders[:, k, r] = d
            s1, s2 = s2, s1

    factor = float(p)
    for k in range(1, order + 1):
        ders[:, k, :] *= factor
        factor *= p - k
    return ders


def find_span(kv: KnotVector, u: float) -> int:
    """Index j of the knot span [t_j, t_{j+1}) containing u (closed at u = 1)."""
    arr = _check_params(u)
    return int(_find_spans(kv, arr)[0])


def basis_nonzero(kv: KnotVector, u: float) -> tuple[int, np.ndarray]:
    """Span index and the values of the p+1 bases active at u.

    Entry ``i`` is the value of basis ``span - p + i``; together they sum to
    one, and every basis outside that window is exactly zero at u.
    """
    arr = _check_params(u)
    spans = _find_spans(kv, arr)
    return int(spans[0]), _basis_values(kv, arr, spans)[0]


def basis_derivatives(kv: KnotVector, u: float, order: int) -> tuple[int, np.ndarray]:
    """Span index and an (order+1, p+1) table of basis derivatives at u.

    Row q holds the q-th derivatives of the active bases; row 0 equals
    :func:`basis_nonzero`. Orders above the degree are rejected because those
    derivatives vanish identically.
    """
    if not 0 <= order <= kv.degree:
        raise DerivativeOrderError(
            f"derivative order {order} invalid for degree {kv.degree}")
    arr = _check_params(u)
    spans = _find_spans(kv, arr)
    return int(spans[0]), _basis_derivative_values(kv, arr, spans, order)[0]


def greville_abscissae(kv: KnotVector) -> np.ndarray:
    """Knot averages (t_{j+1} + ... + t_{j+p}) / p, one per basis function."""
    p = kv.degree
    n = kv.basis_count
    window = np.lib.stride_tricks.sliding_window_view(kv.knots[1 : n + p], p)
    return window.mean(axis=1)


def _basis_value_single(kv, j, u):
    span, vals = basis_nonzero(kv, u)
    i = j - (span - kv.degree)
    if 0 <= i <= kv.degree:
        return float(vals[i])
    return 0.0


def _basis_slope_single(kv, j, u):
    span, table = basis_derivatives(kv, u, 1)
    i = j - (span - kv.degree)
    if 0 <= i <= kv.degree:
        return float(table[1, i])
    return 0.0


def anchor_params(kv: KnotVector, tol: float = 1e-10) -> np.ndarray:
    """Parameter location of each basis function's maximum.

    The first and last bases peak at the clamped endpoints. Interior maxima
    are bracketed by ternary search on the support (each basis is unimodal
    while interior multiplicities stay below the degree) and then polished by
    bisecting the slope's sign change, which resolves the peak much more
    finely than value comparisons alone.
    """
    n = kv.basis_count
    anchors = np.empty(n)
    anchors[0] = 0.0
    anchors[-1] = 1.0
    for j in range(1, n - 1):
        lo, hi = kv.support(j)
        width = hi - lo
        a, b = lo, hi
        while b - a > 1e-3 * width:
            m1 = a + (b - a) / 3.0
            m2 = b - (b - a) / 3.0
            if _basis_value_single(kv, j, m1) < _basis_value_single(kv, j, m2):
                a = m1
            else:
                b = m2
        pad = b - a
        a = max(lo + 1e-9 * width, a - pad)
        b = min(hi - 1e-9 * width, b + pad)
        while b - a > tol:
            mid = 0.5 * (a + b)
            slope = _basis_slope_single(kv, j, mid)
            if slope > 0.0:
                a = mid
            elif slope < 0.0:
                b = mid
            else:
                a = b = mid
        anchors[j] = 0.5 * (a + b)
    return anchors
