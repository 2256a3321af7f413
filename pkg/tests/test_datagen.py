"""Synthetic data-set generators: frozen field values, layouts, determinism."""

import numpy as np
import pytest
from scipy.stats import chisquare

from splinereg.datagen import (
    DEFAULT_VOID_CENTERS,
    POLYSINC_BOX,
    disk_mask,
    outside_hexagon_mask,
    pins3d,
    polysinc,
    sample_quadrant_gradient,
    sample_uniform,
    sample_voids,
    sample_with_hole,
)
from splinereg.exceptions import ConfigError


class TestPolysinc:
    def test_second_factor_peak(self):
        # sinc(8) * sinc(0); value frozen from direct evaluation.
        assert polysinc(2.0, -2.0) == pytest.approx(0.12366978082792272, abs=1e-15)

    def test_origin(self):
        # sinc(0) * sinc(12); value frozen from direct evaluation.
        assert polysinc(0.0, 0.0) == pytest.approx(-0.04471440983336958, abs=1e-15)

    def test_bounded_by_one(self):
        rng = np.random.default_rng(0)
        x = rng.uniform(-4 * np.pi, 4 * np.pi, 100_000)
        y = rng.uniform(-4 * np.pi, 4 * np.pi, 100_000)
        assert np.max(np.abs(polysinc(x, y))) <= 1.0


def _void_density_ratio(cloud, centers, radius):
    box = np.asarray(POLYSINC_BOX)
    area = np.prod(box[:, 1] - box[:, 0])
    in_void = np.zeros(cloud.n_points, dtype=bool)
    for c in centers:
        in_void |= np.sum((cloud.coords - np.asarray(c)) ** 2, axis=1) < radius**2
    void_area = len(centers) * np.pi * radius**2
    inside = in_void.sum() / void_area
    outside = (~in_void).sum() / (area - void_area)
    return inside / outside


class TestVoids:
    def test_no_thinning_at_sparsity_one(self):
        cloud = sample_voids(120_000, sparsity=1.0, seed=1)
        assert cloud.n_points == 120_000
        ratio = _void_density_ratio(cloud, DEFAULT_VOID_CENTERS, np.pi)
        assert 0.9 < ratio < 1.1

    def test_thinned_density_ratio(self):
        cloud = sample_voids(150_000, sparsity=0.02, seed=2)
        ratio = _void_density_ratio(cloud, DEFAULT_VOID_CENTERS, np.pi)
        assert 0.01 < ratio < 0.04

    def test_deterministic(self):
        a = sample_voids(5000, sparsity=0.3, seed=7)
        b = sample_voids(5000, sparsity=0.3, seed=7)
        np.testing.assert_array_equal(a.coords, b.coords)
        np.testing.assert_array_equal(a.values, b.values)

    def test_values_equal_field(self):
        cloud = sample_voids(2000, sparsity=0.5, seed=3)
        want = polysinc(cloud.coords[:, 0], cloud.coords[:, 1])
        np.testing.assert_array_equal(cloud.values[:, 0], want)

    @pytest.mark.parametrize("sparsity", [0.0, -0.5, 1.5])
    def test_bad_sparsity(self, sparsity):
        with pytest.raises(ConfigError):
            sample_voids(100, sparsity=sparsity)


class TestQuadrantGradient:
    def test_exact_allocation(self):
        cloud = sample_quadrant_gradient(22_500, shares=(0.1, 0.2, 0.3, 0.4),
                                         seed=4)
        assert cloud.n_points == 22_500
        cx = cy = 0.0
        q_pp = np.sum((cloud.coords[:, 0] > cx) & (cloud.coords[:, 1] > cy))
        q_mp = np.sum((cloud.coords[:, 0] < cx) & (cloud.coords[:, 1] > cy))
        q_pm = np.sum((cloud.coords[:, 0] > cx) & (cloud.coords[:, 1] < cy))
        q_mm = np.sum((cloud.coords[:, 0] < cx) & (cloud.coords[:, 1] < cy))
        assert (q_pp, q_mp, q_pm, q_mm) == (2250, 4500, 6750, 9000)

    def test_equal_shares_uniform(self):
        cloud = sample_quadrant_gradient(40_000, shares=(0.25, 0.25, 0.25, 0.25),
                                         seed=5)
        counts = []
        for sx in (1, -1):
            for sy in (1, -1):
                counts.append(np.sum((sx * cloud.coords[:, 0] > 0)
                                     & (sy * cloud.coords[:, 1] > 0)))
        assert chisquare(counts).pvalue > 0.001

    def test_default_spec(self):
        cloud = sample_quadrant_gradient(seed=6)
        assert cloud.n_points == 22_500
        box = cloud.bounding_box()
        assert np.all(box[:, 0] > -4 * np.pi) and np.all(box[:, 1] < 4 * np.pi)

    def test_bad_shares(self):
        with pytest.raises(ConfigError):
            sample_quadrant_gradient(100, shares=(0.5, 0.5, 0.1, 0.1))
        with pytest.raises(ConfigError):
            sample_quadrant_gradient(100, shares=(1.0, 0.0, 0.0, 0.0))

    def test_deterministic(self):
        a = sample_quadrant_gradient(3000, seed=8)
        b = sample_quadrant_gradient(3000, seed=8)
        np.testing.assert_array_equal(a.coords, b.coords)


class TestHoles:
    def test_zero_radius_equals_uniform(self):
        hole = sample_with_hole(4000, mask=disk_mask((0.0, 0.0), 0.0), seed=9)
        uniform = sample_uniform(4000, seed=9)
        np.testing.assert_array_equal(hole.coords, uniform.coords)

    def test_disk_hole_is_empty(self):
        r = 2.5
        cloud = sample_with_hole(20_000, mask=disk_mask((1.0, -1.0), r), seed=10)
        assert cloud.n_points == 20_000
        d2 = np.sum((cloud.coords - (1.0, -1.0)) ** 2, axis=1)
        assert np.all(d2 >= r * r)

    def test_hex_prism_containment(self):
        a = 1.0
        h = np.sqrt(3) / 2 * a
        box = ((-a, a), (-h, h), (0.0, 2.0))
        cloud = sample_with_hole(20_000, mask=outside_hexagon_mask(a),
                                 domain=box, seed=11, field=pins3d)
        x, y = cloud.coords[:, 0], cloud.coords[:, 1]
        assert np.all(np.abs(y) <= h + 1e-12)
        assert np.all(np.sqrt(3) * np.abs(x) + np.abs(y) <= np.sqrt(3) * a + 1e-12)
        # Bounding-box corners lie outside the hexagon and must be empty.
        corner = (np.abs(x) > 0.8 * a) & (np.abs(y) > 0.8 * h)
        assert corner.sum() == 0

    def test_full_rejection_is_config_error(self):
        with pytest.raises(ConfigError):
            sample_with_hole(500, mask=lambda c: np.ones(len(c), dtype=bool),
                             seed=12)

    def test_values_match_field_exactly(self):
        cloud = sample_with_hole(1000, mask=disk_mask((0, 0), 3.0), seed=13)
        want = polysinc(cloud.coords[:, 0], cloud.coords[:, 1])
        np.testing.assert_array_equal(cloud.values[:, 0], want)


class TestStatisticalDensity:
    def test_uniform_cell_counts_within_binomial_bounds(self):
        m = 200_000
        cloud = sample_uniform(m, seed=14)
        box = np.asarray(POLYSINC_BOX)
        # 4x4 cells: each has probability 1/16; allow 5 sigma.
        edges = [np.linspace(lo, hi, 5) for lo, hi in box]
        counts, _, _ = np.histogram2d(cloud.coords[:, 0], cloud.coords[:, 1],
                                      bins=edges)
        p = 1 / 16
        sigma = np.sqrt(m * p * (1 - p))
        assert np.max(np.abs(counts - m * p)) < 5 * sigma
