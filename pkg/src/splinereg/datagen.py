"""Deterministic synthetic point clouds: polysinc fields, voids, gradients, holes.

Every generator is a pure function of its arguments; a given seed always
reproduces the same cloud bit for bit. Coordinates are drawn dimension-major
(all of x first, then all of y, ...) from a PCG64 stream so layouts stay
portable across platforms.
"""

from __future__ import annotations

import numpy as np

from .exceptions import ConfigError
from .fitting import PointCloud

__all__ = [
    "POLYSINC_BOX",
    "polysinc",
    "pins3d",
    "disk_mask",
    "outside_hexagon_mask",
    "sample_uniform",
    "sample_voids",
    "sample_quadrant_gradient",
    "sample_with_hole",
    "DEFAULT_VOID_CENTERS",
    "DEFAULT_VOID_RADIUS",
    "DEFAULT_QUADRANT_SHARES",
]

POLYSINC_BOX = ((-4.0 * np.pi, 4.0 * np.pi), (-4.0 * np.pi, 4.0 * np.pi))

DEFAULT_VOID_RADIUS = np.pi
DEFAULT_VOID_CENTERS = (
    (2.0 * np.pi, 2.0 * np.pi),
    (-2.0 * np.pi, 2.0 * np.pi),
    (2.0 * np.pi, -2.0 * np.pi),
    (-2.0 * np.pi, -2.0 * np.pi),
)

# Quadrant order (+,+), (-,+), (+,-), (-,-): the (+,+) quadrant gets by far
# the fewest points, leaving parts of it with no data at all at default counts.
DEFAULT_QUADRANT_SHARES = (0.01, 0.19, 0.30, 0.50)


def _usinc(t):
    # Unnormalized sinc: sin(t)/t with the removable singularity filled in.
    return np.sinc(np.asarray(t) / np.pi)


def polysinc(x, y):
    """Product of two unnormalized sinc bumps, bounded by 1 in magnitude."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return _usinc(x * x + y * y) * _usinc(2.0 * (x - 2.0) ** 2 + (y + 2.0) ** 2)


def pins3d(x, y, z):
    """Smooth 3-d test field: six Gaussian pins on a hexagon, z-modulated."""
    x, y, z = (np.asarray(a, dtype=float) for a in (x, y, z))
    out = np.zeros(np.broadcast(x, y, z).shape)
    for k in range(6):
        cx = 0.55 * np.cos(np.pi * k / 3.0)
        cy = 0.55 * np.sin(np.pi * k / 3.0)
        out = out + np.exp(-8.0 * ((x - cx) ** 2 + (y - cy) ** 2))
    return out * (1.0 + 0.5 * np.cos(np.pi * z))


def _check_box(domain):
    box = np.asarray(domain, dtype=float)
    if box.ndim != 2 or box.shape[1] != 2 or np.any(box[:, 1] <= box[:, 0]):
        raise ConfigError(f"bad domain box {domain!r}")
    return box


def _draw_uniform(rng, box, count):
    # Dimension-major stream discipline.
    cols = [rng.uniform(lo, hi, count) for lo, hi in box]
    return np.column_stack(cols)


def _evaluate_field(field, coords):
    vals = np.asarray(field(*(coords[:, k] for k in range(coords.shape[1]))),
                      dtype=float)
    if vals.ndim == 1:
        vals = vals[:, None]
    return vals


def sample_uniform(n_points, *, domain=POLYSINC_BOX, seed=0, field=polysinc):
    """Uniform cloud over the box, valued by the analytic field."""
    box = _check_box(domain)
    rng = np.random.default_rng(seed)
    coords = _draw_uniform(rng, box, int(n_points))
    return PointCloud(coords, _evaluate_field(field, coords))


def sample_voids(n_points, *, sparsity, centers=DEFAULT_VOID_CENTERS,
                 radius=DEFAULT_VOID_RADIUS, domain=POLYSINC_BOX, seed=0,
                 field=polysinc):
    """Uniform cloud thinned inside disk-shaped voids.

    ``n_points`` candidates are drawn uniformly; a candidate inside any void
    survives with probability ``sparsity``, so the in-void density is that
    fraction of the base density.
    """
    if not 0.0 < sparsity <= 1.0:
        raise ConfigError(f"sparsity must be in (0, 1], got {sparsity}")
    box = _check_box(domain)
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    radii = np.broadcast_to(np.asarray(radius, dtype=float), centers.shape[0])
    rng = np.random.default_rng(seed)
    coords = _draw_uniform(rng, box, int(n_points))
    accept = rng.uniform(0.0, 1.0, int(n_points))
    in_void = np.zeros(int(n_points), dtype=bool)
    for c, r in zip(centers, radii):
        in_void |= np.sum((coords - c) ** 2, axis=1) < r * r
    keep = ~in_void | (accept < sparsity)
    coords = coords[keep]
    return PointCloud(coords, _evaluate_field(field, coords))


def _allocate_counts(total, shares):
    raw = np.asarray(shares, dtype=float) * total
    counts = np.floor(raw).astype(int)
    # Largest-remainder rounding keeps the total exact.
    for idx in np.argsort(raw - counts)[::-1][: total - counts.sum()]:
        counts[idx] += 1
    return counts


def sample_quadrant_gradient(n_points=22500, *, shares=DEFAULT_QUADRANT_SHARES,
                             domain=POLYSINC_BOX, seed=0, field=polysinc):
    """Per-quadrant uniform cloud with prescribed count shares.

    Shares follow the quadrant order (+,+), (-,+), (+,-), (-,-) relative to
    the box center and must be positive and sum to one.
    """
    box = _check_box(domain)
    if box.shape[0] != 2:
        raise ConfigError("quadrant layout is two-dimensional")
    shares = np.asarray(shares, dtype=float)
    if shares.shape != (4,) or np.any(shares <= 0):
        raise ConfigError("need four positive quadrant shares")
    if abs(shares.sum() - 1.0) > 1e-9:
        raise ConfigError(f"shares sum to {shares.sum()}, expected 1")
    counts = _allocate_counts(int(n_points), shares)
    cx, cy = box.mean(axis=1)
    quadrants = (
        ((cx, box[0, 1]), (cy, box[1, 1])),
        ((box[0, 0], cx), (cy, box[1, 1])),
        ((cx, box[0, 1]), (box[1, 0], cy)),
        ((box[0, 0], cx), (box[1, 0], cy)),
    )
    rng = np.random.default_rng(seed)
    parts = [_draw_uniform(rng, qbox, count)
             for qbox, count in zip(quadrants, counts)]
    coords = np.concatenate(parts, axis=0)
    return PointCloud(coords, _evaluate_field(field, coords))


def disk_mask(center, radius):
    """Rejection predicate for a disk-shaped hole."""
    center = np.asarray(center, dtype=float)

    def mask(coords):
        return np.sum((coords - center) ** 2, axis=1) < radius * radius

    return mask


def outside_hexagon_mask(circumradius, center=(0.0, 0.0)):
    """Rejection predicate keeping points inside a hexagonal prism.

    The hexagon lives in the first two coordinates (pointy-top, vertices at
    ``(+-a, 0)`` around the center); any further coordinates pass through, so
    in 3-d the kept region is a hexagonal prism and the bounding-box corners
    stay empty.
    """
    a = float(circumradius)
    cx, cy = (float(c) for c in center)
    h = np.sqrt(3.0) / 2.0 * a

    def mask(coords):
        x = coords[:, 0] - cx
        y = coords[:, 1] - cy
        inside = (np.abs(y) <= h) & (np.sqrt(3.0) * np.abs(x) + np.abs(y)
                                     <= np.sqrt(3.0) * a)
        return ~inside

    return mask


def sample_with_hole(n_points, *, mask, domain=POLYSINC_BOX, seed=0,
                     field=polysinc):
    """Uniform cloud on the complement of a masked-out hole.

    Candidates are drawn in blocks of ``n_points`` and rejected wherever
    ``mask`` flags them, until the requested count is reached.
    """
    box = _check_box(domain)
    n_points = int(n_points)
    rng = np.random.default_rng(seed)
    kept = []
    remaining = n_points
    drawn = 0
    while remaining > 0:
        coords = _draw_uniform(rng, box, n_points)
        coords = coords[~np.asarray(mask(coords), dtype=bool)]
        drawn += n_points
        if coords.shape[0] == 0 and drawn >= max(10 * n_points, 10000):
            raise ConfigError("mask rejects (almost) the entire domain")
        kept.append(coords[:remaining])
        remaining -= kept[-1].shape[0]
    coords = np.concatenate(kept, axis=0)
    return PointCloud(coords, _evaluate_field(field, coords))
