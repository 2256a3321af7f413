"""Serialization round trips and parse-error reporting."""

import numpy as np
import pytest

from splinereg.basis import uniform_knots
from splinereg.exceptions import ModelFormatError
from splinereg.fitting import FitConfig, FitReport, PointCloud, fit
from splinereg.modelio import (
    load_model,
    read_cloud_csv,
    read_report,
    save_model,
    write_cloud_csv,
    write_report,
)
from splinereg.tensor import TensorSpline


@pytest.fixture
def cloud():
    rng = np.random.default_rng(0)
    coords = rng.uniform(-5, 5, (200, 2))
    return PointCloud(coords, np.column_stack([np.sin(coords[:, 0]),
                                               coords[:, 1] ** 2]))


@pytest.fixture
def model():
    rng = np.random.default_rng(1)
    kvs = (uniform_knots(3, 7), uniform_knots(2, 5))
    return TensorSpline(kvs, rng.standard_normal((35, 2)),
                        [[-1.5, 2.5], [0.0, 10.0]])


class TestCloudCsv:
    def test_round_trip_bit_exact(self, cloud, tmp_path):
        path = tmp_path / "cloud.csv"
        write_cloud_csv(path, cloud)
        back = read_cloud_csv(path)
        np.testing.assert_array_equal(back.coords, cloud.coords)
        np.testing.assert_array_equal(back.values, cloud.values)

    def test_header_and_line_endings(self, cloud, tmp_path):
        path = tmp_path / "cloud.csv"
        write_cloud_csv(path, cloud)
        raw = path.read_bytes()
        assert raw.startswith(b"# d=2 s=2\n")
        assert b"\r" not in raw

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("not a header\n1,2,3\n")
        with pytest.raises(ModelFormatError) as err:
            read_cloud_csv(path)
        assert err.value.line == 1

    def test_bad_field_count_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("# d=2 s=1\n1.0,2.0,3.0\n1.0,2.0\n")
        with pytest.raises(ModelFormatError) as err:
            read_cloud_csv(path)
        assert err.value.line == 3

    def test_bad_float_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("# d=2 s=1\n1.0,2.0,zap\n")
        with pytest.raises(ModelFormatError) as err:
            read_cloud_csv(path)
        assert err.value.line == 2


class TestModelJson:
    def test_round_trip_bit_exact(self, model, tmp_path):
        path = tmp_path / "model.json"
        save_model(path, model)
        back = load_model(path)
        assert back.domain_dim == model.domain_dim
        assert back.control_dims == model.control_dims
        for kv_a, kv_b in zip(back.knot_vectors, model.knot_vectors):
            assert kv_a.degree == kv_b.degree
            np.testing.assert_array_equal(kv_a.knots, kv_b.knots)
        np.testing.assert_array_equal(back.control_points, model.control_points)
        np.testing.assert_array_equal(back.domain_box, model.domain_box)

    def test_reloaded_model_evaluates_identically(self, model, tmp_path):
        path = tmp_path / "model.json"
        save_model(path, model)
        back = load_model(path)
        rng = np.random.default_rng(2)
        U = rng.uniform(0, 1, (100, 2))
        np.testing.assert_array_equal(back.eval_many(U), model.eval_many(U))

    def test_corrupt_json_reports_line(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text('{"format": "splinereg-model",\n "version": }\n')
        with pytest.raises(ModelFormatError) as err:
            load_model(path)
        assert err.value.line == 2

    def test_wrong_format_tag(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text('{"format": "something-else", "version": 1}\n')
        with pytest.raises(ModelFormatError):
            load_model(path)

    def test_missing_field(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text('{"format": "splinereg-model", "version": 1}\n')
        with pytest.raises(ModelFormatError):
            load_model(path)


class TestReport:
    def test_round_trip(self, cloud, tmp_path):
        fitted, report = fit(cloud, FitConfig(degrees=(2, 2),
                                              control_dims=(6, 6), s_star=1.5))
        path = tmp_path / "report.txt"
        write_report(path, report)
        back = read_report(path)
        np.testing.assert_array_equal(back.lambda1, report.lambda1)
        np.testing.assert_array_equal(back.lambda2, report.lambda2)
        np.testing.assert_array_equal(back.col_sums, report.col_sums)
        np.testing.assert_array_equal(back.stilde1, report.stilde1)
        np.testing.assert_array_equal(back.stilde2, report.stilde2)
        assert back.residual_l2 == report.residual_l2
        assert back.solver_iterations == report.solver_iterations

    def test_infinite_condition_round_trips(self, tmp_path):
        report = FitReport(lambda1=np.zeros(3), lambda2=np.zeros(3),
                           col_sums=np.ones(3), stilde1=np.ones(3),
                           stilde2=np.ones(3), residual_l2=0.5,
                           stacked_condition=float("inf"), solver_iterations=4)
        path = tmp_path / "report.txt"
        write_report(path, report)
        back = read_report(path)
        assert back.stacked_condition == float("inf")

    def test_missing_entries(self, tmp_path):
        path = tmp_path / "report.txt"
        path.write_text("solver_iterations=3\n")
        with pytest.raises(ModelFormatError):
            read_report(path)
