"""Metrics, benchmark-table plumbing, and report serialization."""

import io
import json
import math

import numpy as np
import pytest

from icsrbf import analysis
from icsrbf.core import CollocationSetup, solve
from icsrbf.errors import ConfigError
from icsrbf.problems import standard_lane_emden


def _solved(m, N=20, rw=6.5, L=10.0, gamma=1.5):
    inst = standard_lane_emden(m)
    setup = CollocationSetup(N=N, L=L, gamma=gamma, r_omega=rw)
    return inst, solve(inst.spec, setup)


class TestFirstZero:
    def test_exact_parabola(self):
        # 1 - x^2/6 vanishes at sqrt(6)
        z = analysis.first_zero(lambda x: 1.0 - np.asarray(x) ** 2 / 6.0, 5.0)
        assert z == pytest.approx(math.sqrt(6.0), abs=1e-10)

    def test_exact_sinc(self):
        inst = standard_lane_emden(1)
        z = analysis.first_zero(inst.exact, 6.0)
        assert z == pytest.approx(math.pi, abs=1e-10)

    def test_positive_function_has_none(self):
        inst = standard_lane_emden(5)
        assert analysis.first_zero(inst.exact, 50.0) is None

    def test_grid_node_hit(self):
        # linear function crossing exactly at a scan node
        z = analysis.first_zero(lambda x: 1.0 - np.asarray(x), 2.0, grid=2000)
        assert z == pytest.approx(1.0, abs=1e-10)

    def test_on_solution_object(self):
        _, sol = _solved(1, N=40)
        z = analysis.first_zero(sol, 6.5)
        assert z == pytest.approx(math.pi, abs=1e-6)

    def test_returns_first_of_several_zeros(self):
        z = analysis.first_zero(lambda x: np.cos(np.asarray(x)), 20.0)
        assert z == pytest.approx(math.pi / 2.0, abs=1e-10)


class TestErrorMetrics:
    def test_max_error_of_exact_is_zero(self):
        inst = standard_lane_emden(0)
        xs = np.linspace(0.1, 3.0, 50)
        assert analysis.max_error(inst.exact, inst.exact, xs) == 0.0

    def test_max_error_known_offset(self):
        f = lambda x: np.zeros_like(np.asarray(x, dtype=float))
        g = lambda x: np.asarray(x, dtype=float) * 0.0 + 0.25
        xs = np.linspace(0, 1, 10)
        assert analysis.max_error(f, g, xs) == 0.25

    def test_max_error_default_grid_uses_setup_length(self):
        inst, sol = _solved(0)
        err = analysis.max_error(sol, inst.exact)
        assert 0.0 < err < 1e-3

    def test_res_norm_nonnegative_and_small_for_converged(self):
        _, sol = _solved(2, N=20, rw=4.0, L=6.0)
        val = analysis.res_norm_2(sol)
        assert 0.0 <= val < 1e-2

    def test_res_norm_rejects_tiny_M(self):
        _, sol = _solved(0)
        with pytest.raises(ConfigError):
            analysis.res_norm_2(sol, M=1)

    def test_res_norm_scales_with_M(self):
        # unscaled discrete norm: more points never decrease the sum
        _, sol = _solved(2, N=10, rw=4.0, L=6.0)
        a = analysis.res_norm_2(sol, M=100)
        b = analysis.res_norm_2(sol, M=400)
        assert b >= a * 0.9


class TestTableConfigs:
    def test_all_ids_have_configs(self):
        for tid in analysis.TABLE_IDS:
            assert analysis.table_config(tid)

    def test_unknown_id(self):
        with pytest.raises(ConfigError):
            analysis.table_config(12)

    def test_first_zero_rows_cover_published_indices(self):
        cfg = analysis.table_config(2)
        assert sorted(cfg["rows"]) == [0.0, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0]


class TestRunTable:
    def test_white_dwarf_table(self):
        reports = analysis.run_table(9)
        assert len(reports) == 24  # 3 sigmas x 8 sample points
        for rep in reports:
            assert rep.reference is not None
            assert rep.abs_error < 1e-4

    def test_first_zero_table_rows(self):
        reports = analysis.run_table(2)
        assert len(reports) == 7
        by_m = {rep.param: rep for rep in reports}
        assert by_m[0.0].value == pytest.approx(math.sqrt(6.0), abs=1e-6)
        assert by_m[1.0].value == pytest.approx(math.pi, abs=1e-6)

    def test_metrics_report_abs_error(self):
        rep = analysis.MetricsReport(
            problem="p", param=None, N=5, r_omega=1.0, L=1.0, gamma=1.5,
            metric="m", value=2.0, reference=1.5)
        assert rep.abs_error == 0.5
        rep2 = analysis.MetricsReport(
            problem="p", param=None, N=5, r_omega=1.0, L=1.0, gamma=1.5,
            metric="m", value=2.0)
        assert rep2.abs_error is None

    def test_build_table_flags_missing_references(self):
        reports = analysis.build_table(
            "sinh", [{"N": 5, "r_omega": 1.0, "L": 2.0, "gamma": 1.7}], [])
        assert len(reports) == 1
        assert reports[0].warning


class TestSerialization:
    def _sample_reports(self):
        return [
            analysis.MetricsReport(
                problem="lane-emden", param=2.0, N=20, r_omega=4.0, L=6.0,
                gamma=1.5, metric="y(0.5)", value=0.9598391331481594,
                reference=0.9598391, source="horedt"),
            analysis.MetricsReport(
                problem="sinh", param=None, N=20, r_omega=1.0, L=2.0,
                gamma=1.7, metric="res_norm_2", value=1.25e-06),
        ]

    def test_csv_round_trip(self):
        reports = self._sample_reports()
        buf = io.StringIO()
        analysis.reports_to_csv(reports, buf)
        buf.seek(0)
        back = analysis.reports_from_csv(buf)
        assert len(back) == len(reports)
        for a, b in zip(reports, back):
            assert a.problem == b.problem
            assert a.param == b.param
            assert a.N == b.N
            assert a.metric == b.metric
            # repr round-trips floats exactly
            assert a.value == b.value
            assert a.reference == b.reference

    def test_json_fields(self):
        doc = json.loads(analysis.reports_to_json(self._sample_reports()))
        assert len(doc) == 2
        assert set(doc[0]) == set(analysis.REPORT_FIELDS)
        assert doc[0]["abs_error"] == pytest.approx(3.31e-08, rel=1e-2)
        assert doc[1]["reference"] is None
