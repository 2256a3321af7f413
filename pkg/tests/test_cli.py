"""End-to-end CLI checks: artifacts, determinism, exit codes."""

import numpy as np
import pytest

from splinereg.analysis import grid_sample
from splinereg.cli import main
from splinereg.modelio import load_model, read_cloud_csv, write_cloud_csv
from splinereg.fitting import PointCloud


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def small_cloud_csv(tmp_path):
    path = tmp_path / "cloud.csv"
    assert run("generate", "--layout", "uniform", "--points", 2500,
               "--seed", 3, "--out", path) == 0
    return path


class TestGenerate:
    def test_quadrant_row_count(self, tmp_path):
        out = tmp_path / "quad.csv"
        assert run("generate", "--layout", "quadrant", "--points", 22500,
                   "--seed", 7, "--out", out) == 0
        cloud = read_cloud_csv(out)
        assert cloud.n_points == 22500

    def test_voids_sparsity_one_is_uniform(self, tmp_path):
        v = tmp_path / "voids.csv"
        u = tmp_path / "uniform.csv"
        assert run("generate", "--layout", "voids", "--sparsity", 1.0,
                   "--points", 4000, "--seed", 5, "--out", v) == 0
        assert run("generate", "--layout", "uniform", "--points", 4000,
                   "--seed", 5, "--out", u) == 0
        assert v.read_bytes() == u.read_bytes()

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            assert run("generate", "--layout", "voids", "--sparsity", 0.1,
                       "--points", 3000, "--seed", 11, "--out", out) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_bad_flags_exit_one(self, tmp_path):
        assert run("generate", "--layout", "nope",
                   "--out", tmp_path / "x.csv") == 1
        assert run("generate", "--layout", "voids", "--sparsity", 2.0,
                   "--out", tmp_path / "x.csv") == 1


class TestFit:
    def test_fit_writes_model_and_report(self, small_cloud_csv, tmp_path):
        model_path = tmp_path / "model.json"
        report_path = tmp_path / "report.txt"
        assert run("fit", small_cloud_csv, "--degree", 2, "--controls", "8,8",
                   "--sstar", 1.0, "--out", model_path,
                   "--report", report_path) == 0
        model = load_model(model_path)
        assert model.control_dims == (8, 8)
        assert report_path.exists()

    def test_sstar_zero_equals_no_reg_byte_identical(self, small_cloud_csv,
                                                     tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert run("fit", small_cloud_csv, "--degree", 2, "--controls", "8,8",
                   "--sstar", 0.0, "--out", a) == 0
        assert run("fit", small_cloud_csv, "--degree", 2, "--controls", "8,8",
                   "--no-reg", "--out", b) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_solver_failure_exit_three(self, tmp_path):
        # Data confined to a corner of a wide box: unregularized direct solve
        # must flag rank deficiency.
        rng = np.random.default_rng(0)
        coords = np.vstack([rng.uniform(0, 1, (60, 2)), [[10.0, 10.0]]])
        cloud_path = tmp_path / "corner.csv"
        write_cloud_csv(cloud_path, PointCloud(coords, np.ones(61)))
        assert run("fit", cloud_path, "--degree", 2, "--controls", "8,8",
                   "--no-reg", "--out", tmp_path / "m.json") == 3

    def test_missing_input_exit_two(self, tmp_path):
        assert run("fit", tmp_path / "absent.csv", "--controls", "6,6",
                   "--out", tmp_path / "m.json") == 2

    def test_iterative_solver_flag(self, small_cloud_csv, tmp_path):
        assert run("fit", small_cloud_csv, "--degree", 2, "--controls", "7,7",
                   "--solver", "cg", "--tol", 1e-12,
                   "--out", tmp_path / "m.json") == 0


class TestSample:
    def test_grid_rows_and_bit_exact_reload(self, small_cloud_csv, tmp_path):
        model_path = tmp_path / "model.json"
        run("fit", small_cloud_csv, "--degree", 2, "--controls", "8,8",
            "--out", model_path)
        grid_path = tmp_path / "grid.csv"
        assert run("sample", model_path, "--resolution", "40,50",
                   "--out", grid_path) == 0
        grid_cloud = read_cloud_csv(grid_path)
        assert grid_cloud.n_points == 2000
        model = load_model(model_path)
        want = grid_sample(model, (40, 50)).reshape(-1, 1)
        np.testing.assert_array_equal(grid_cloud.values, want)

    def test_constant_model_single_gray_pgm(self, tmp_path):
        # A constant data set fits to an exactly flat model.
        rng = np.random.default_rng(1)
        coords = rng.uniform(-1, 1, (400, 2))
        cloud_path = tmp_path / "flat.csv"
        write_cloud_csv(cloud_path, PointCloud(coords, np.zeros(400)))
        model_path = tmp_path / "flat.json"
        run("fit", cloud_path, "--degree", 2, "--controls", "6,6",
            "--sstar", 0.0, "--out", model_path)
        pgm_path = tmp_path / "flat.pgm"
        assert run("sample", model_path, "--resolution", "16,16",
                   "--out", tmp_path / "g.csv", "--pgm", pgm_path) == 0
        raw = pgm_path.read_bytes()
        assert raw.startswith(b"P5\n16 16\n65535\n")
        gray = np.frombuffer(raw.split(b"65535\n", 1)[1], dtype=">u2")
        assert np.unique(gray).size == 1

    def test_corrupt_model_exit_two(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{broken\n")
        assert run("sample", bad, "--resolution", "4,4",
                   "--out", tmp_path / "g.csv") == 2


class TestMetrics:
    def test_zero_model_against_zero_reference(self, tmp_path, capsys):
        rng = np.random.default_rng(2)
        coords = rng.uniform(-2, 2, (500, 2))
        cloud_path = tmp_path / "zero.csv"
        write_cloud_csv(cloud_path, PointCloud(coords, np.zeros(500)))
        model_path = tmp_path / "zero.json"
        run("fit", cloud_path, "--degree", 2, "--controls", "6,6",
            "--sstar", 0.0, "--out", model_path)
        capsys.readouterr()
        assert run("metrics", model_path, "--reference", cloud_path) == 0
        out = capsys.readouterr().out
        lines = dict(line.split("=", 1) for line in out.strip().splitlines())
        assert float(lines["l2"]) == 0.0
        assert float(lines["linf"]) == 0.0
        assert int(lines["count"]) == 500

    def test_analytic_reference_with_region(self, small_cloud_csv, tmp_path,
                                            capsys):
        model_path = tmp_path / "m.json"
        run("fit", small_cloud_csv, "--degree", 3, "--controls", "12,12",
            "--out", model_path)
        capsys.readouterr()
        # Negative bounds need the = form, or argparse reads them as flags.
        assert run("metrics", model_path, "--reference", "polysinc",
                   "--resolution", "80,80", "--region=-3,3,-3,3") == 0
        out = capsys.readouterr().out
        assert "l2=" in out and "linf=" in out and "region=" in out

    def test_unknown_reference_exit_one(self, small_cloud_csv, tmp_path):
        model_path = tmp_path / "m.json"
        run("fit", small_cloud_csv, "--degree", 2, "--controls", "6,6",
            "--out", model_path)
        assert run("metrics", model_path, "--reference", "nosuchfield") == 1


class TestStrength:
    def test_strength_grid(self, tmp_path):
        cloud_path = tmp_path / "cloud.csv"
        run("generate", "--layout", "quadrant", "--points", 4000, "--seed", 9,
            "--shares", "0.004,0.196,0.3,0.5", "--out", cloud_path)
        model_path, report_path = tmp_path / "m.json", tmp_path / "r.txt"
        assert run("fit", cloud_path, "--degree", 2, "--controls", "14,14",
                   "--sstar", 1.0, "--out", model_path,
                   "--report", report_path) == 0
        out_path = tmp_path / "strength.csv"
        assert run("strength", model_path, report_path, "--order", 1,
                   "--resolution", "20,20", "--out", out_path) == 0
        field = read_cloud_csv(out_path)
        assert field.n_points == 400
        assert np.min(field.values) >= 0.0


class TestUsage:
    def test_no_command(self):
        assert run() == 1

    def test_unknown_command(self):
        assert run("frobnicate") == 1
