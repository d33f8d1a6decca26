"""End-to-end CLI tests: exit codes, output formats, config layering,
determinism, and companion figures."""

import csv
import json
import os

import numpy as np
import pytest

from icsrbf.cli import main


def _read_csv(path):
    """Rows of a CSV with '#' comment lines stripped."""
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def _comments(path):
    with open(path) as fh:
        return [ln.rstrip("\n") for ln in fh if ln.startswith("#")]


class TestSolve:
    def test_basic_solve(self, tmp_path):
        out = tmp_path / "sol.csv"
        rc = main(["solve", "--problem", "lane-emden", "--m", "2",
                   "--N", "20", "--rw", "4", "--L", "6",
                   "--output", str(out), "--no-timestamp"])
        assert rc == 0
        rows = _read_csv(out)
        assert len(rows) == 201  # samples plus the origin
        assert float(rows[0]["x"]) == 0.0
        assert float(rows[0]["y"]) == 1.0
        ys = {float(r["x"]): float(r["y"]) for r in rows}
        assert ys[0.51] == pytest.approx(0.9582, abs=1e-3)
        assert any("converged: True" in c for c in _comments(out))

    def test_figure_written_next_to_output(self, tmp_path):
        out = tmp_path / "sol.csv"
        rc = main(["solve", "--problem", "sinh", "--N", "15", "--rw", "1",
                   "--L", "2", "--output", str(out), "--no-timestamp"])
        assert rc == 0
        assert (tmp_path / "sol.png").exists()

    def test_no_figure_flag(self, tmp_path):
        out = tmp_path / "sol.csv"
        rc = main(["solve", "--problem", "sinh", "--N", "15", "--rw", "1",
                   "--L", "2", "--output", str(out), "--no-timestamp",
                   "--no-figure"])
        assert rc == 0
        assert not (tmp_path / "sol.png").exists()

    def test_json_format(self, tmp_path):
        out = tmp_path / "sol.json"
        rc = main(["solve", "--problem", "sin", "--N", "15", "--rw", "2",
                   "--L", "2", "--format", "json",
                   "--output", str(out), "--no-timestamp"])
        assert rc == 0
        doc = json.loads(out.read_text())
        assert doc["diagnostics"]["converged"] is True
        assert doc["samples"][0] == {
            "x": 0.0, "y": 1.0, "dy": 0.0, "d2y": doc["samples"][0]["d2y"],
            "res": 0.0}

    def test_deterministic_output(self, tmp_path):
        args = ["solve", "--problem", "lane-emden", "--m", "3",
                "--N", "15", "--rw", "6.5", "--L", "8", "--no-timestamp",
                "--no-figure"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--output", str(a)]) == 0
        assert main(args + ["--output", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_timestamp_line_present_by_default(self, tmp_path):
        out = tmp_path / "sol.csv"
        rc = main(["solve", "--problem", "sinh", "--N", "10", "--rw", "1",
                   "--L", "2", "--output", str(out), "--no-figure"])
        assert rc == 0
        assert any(c.startswith("# generated ") for c in _comments(out))


class TestExitCodes:
    def test_config_error_bad_N(self, tmp_path, capsys):
        rc = main(["solve", "--problem", "sinh", "--N", "1",
                   "--output", str(tmp_path / "x.csv")])
        assert rc == 1
        err = json.loads(capsys.readouterr().err)
        assert "error" in err

    def test_config_error_missing_m(self, tmp_path):
        rc = main(["solve", "--problem", "lane-emden",
                   "--output", str(tmp_path / "x.csv")])
        assert rc == 1

    def test_config_error_unparseable_N(self, tmp_path):
        rc = main(["solve", "--problem", "sinh", "--N", "abc",
                   "--output", str(tmp_path / "x.csv")])
        assert rc == 1

    def test_config_error_unknown_table(self, tmp_path):
        rc = main(["table", "--id", "99",
                   "--output", str(tmp_path / "x.csv")])
        assert rc == 1

    def test_solver_failure_exit_code(self, tmp_path, capsys):
        # one Newton iteration cannot converge the nonlinear m=3 system
        rc = main(["solve", "--problem", "lane-emden", "--m", "3",
                   "--N", "15", "--rw", "6.5", "--L", "8", "--max-iter", "1",
                   "--output", str(tmp_path / "x.csv"), "--no-timestamp",
                   "--no-figure"])
        assert rc == 2
        err = json.loads(capsys.readouterr().err)
        assert err["converged"] is False

    def test_sweep_all_points_failing(self, tmp_path):
        rc = main(["sweep", "--problem", "lane-emden", "--m", "3",
                   "--N", "15,20", "--rw", "6.5", "--L", "8",
                   "--max-iter", "1", "--output", str(tmp_path / "x.csv"),
                   "--no-timestamp", "--no-figure"])
        assert rc == 2


class TestConfigFile:
    def test_config_file_supplies_values(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "problem": "sinh", "N": 15, "rw": 1.0, "L": 2.0,
            "no_timestamp": True, "no_figure": True}))
        out = tmp_path / "sol.csv"
        rc = main(["solve", "--config", str(cfg), "--output", str(out)])
        assert rc == 0
        assert any("sinh" in c for c in _comments(out))

    def test_flags_override_config(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "problem": "sinh", "N": 15, "rw": 1.0, "L": 2.0,
            "no_timestamp": True, "no_figure": True}))
        out = tmp_path / "sol.csv"
        rc = main(["solve", "--config", str(cfg), "--problem", "sin",
                   "--rw", "2.0", "--output", str(out)])
        assert rc == 0
        assert any("sin nonlinearity" in c for c in _comments(out))

    def test_unknown_config_key(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"problem": "sinh", "bogus": 1}))
        rc = main(["solve", "--config", str(cfg)])
        assert rc == 1

    def test_unreadable_config(self, tmp_path):
        rc = main(["solve", "--config", str(tmp_path / "missing.json")])
        assert rc == 1

    def test_malformed_config(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("{not json")
        rc = main(["solve", "--config", str(cfg)])
        assert rc == 1


class TestTable:
    def test_first_zero_table(self, tmp_path):
        out = tmp_path / "t2.csv"
        rc = main(["table", "--id", "2", "--output", str(out),
                   "--no-timestamp", "--no-figure"])
        assert rc == 0
        rows = _read_csv(out)
        assert len(rows) == 7
        zero_m0 = next(r for r in rows if float(r["param"]) == 0.0)
        assert float(zero_m0["value"]) == pytest.approx(np.sqrt(6.0), abs=1e-6)
        assert float(zero_m0["abs_error"]) < 1e-6

    def test_table_json(self, tmp_path):
        out = tmp_path / "t10.json"
        rc = main(["table", "--id", "10", "--format", "json",
                   "--output", str(out), "--no-timestamp", "--no-figure"])
        assert rc == 0
        doc = json.loads(out.read_text())
        assert all(row["problem"] == "sinh" for row in doc)

    def test_table_figure(self, tmp_path):
        out = tmp_path / "t11.csv"
        rc = main(["table", "--id", "11", "--output", str(out),
                   "--no-timestamp"])
        assert rc == 0
        assert (tmp_path / "t11.png").exists()


class TestSweep:
    def test_monotone_residual_decay(self, tmp_path):
        out = tmp_path / "sweep.csv"
        rc = main(["sweep", "--problem", "lane-emden", "--m", "2",
                   "--N", "5,10,15,20", "--rw", "4", "--L", "6",
                   "--output", str(out), "--no-timestamp", "--no-figure"])
        assert rc == 0
        rows = _read_csv(out)
        assert [int(r["N"]) for r in rows] == [5, 10, 15, 20]
        norms = [float(r["res_norm_2"]) for r in rows]
        assert all(a > b for a, b in zip(norms, norms[1:]))
        assert all(r["converged"] == "True" for r in rows)

    def test_sweep_figure(self, tmp_path):
        out = tmp_path / "sweep.csv"
        rc = main(["sweep", "--problem", "isothermal",
                   "--N", "10,20", "--rw", "6.5", "--L", "2.5",
                   "--output", str(out), "--no-timestamp"])
        assert rc == 0
        assert (tmp_path / "sweep.png").exists()

    def test_empty_N_list(self, tmp_path):
        rc = main(["sweep", "--problem", "sinh", "--N", "",
                   "--output", str(tmp_path / "x.csv")])
        assert rc == 1

    def test_partial_failure_still_succeeds(self, tmp_path):
        # N=3 with this support radius fails; the rest converge, exit 0
        out = tmp_path / "sweep.csv"
        rc = main(["sweep", "--problem", "lane-emden", "--m", "3",
                   "--N", "1,15,20", "--rw", "6.5", "--L", "8",
                   "--output", str(out), "--no-timestamp", "--no-figure"])
        assert rc == 0
        rows = _read_csv(out)
        assert rows[0]["error"]
        assert rows[1]["converged"] == "True"


class TestStdout:
    def test_solve_to_stdout(self, capsys):
        rc = main(["solve", "--problem", "sinh", "--N", "10", "--rw", "1",
                   "--L", "2", "--samples", "5", "--no-timestamp"])
        assert rc == 0
        outp = capsys.readouterr().out
        assert "x,y,dy,d2y,res" in outp
