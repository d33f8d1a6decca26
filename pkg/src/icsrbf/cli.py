"""Command-line front end: single solves, benchmark-table reproduction,
and N-sweeps, with CSV/JSON output and companion figures.

Exit codes: 0 success, 1 configuration error, 2 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import analysis, plots
from . import problems as prob_mod
from .core import CollocationSetup, solve
from .errors import ConfigError, IcsrbfError, InvalidParameterError, SolverError
from .kernels import wendland

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2

DEFAULTS = {
    "problem": "lane-emden",
    "m": None,
    "sigma": None,
    "N": 20,
    "rw": 4.0,
    "L": 6.0,
    "gamma": None,        # problem-family default when unset
    "kernel_s": 3,
    "kernel_k": 3,
    "quad_order": 64,
    "tol": 1e-12,
    "max_iter": 50,
    "samples": 200,
    "output": None,
    "format": "csv",
    "no_timestamp": False,
    "no_figure": False,
}


def _fail(code, error, extra=None):
    payload = {"error": error}
    if extra:
        payload.update(extra)
    print(json.dumps(payload), file=sys.stderr)
    return code


def _add_common(parser):
    parser.add_argument("--config", help="JSON config file; flags override its values")
    parser.add_argument("--problem", choices=prob_mod.PROBLEM_NAMES)
    parser.add_argument("--m", type=float, help="polytropic index (lane-emden)")
    parser.add_argument("--sigma", type=float, help="white-dwarf parameter")
    parser.add_argument("--N", help="collocation points (comma list for sweep)")
    parser.add_argument("--rw", type=float, help="support radius")
    parser.add_argument("--L", type=float, help="last collocation node")
    parser.add_argument("--gamma", type=float, help="grid grading exponent")
    parser.add_argument("--kernel-s", dest="kernel_s", type=int)
    parser.add_argument("--kernel-k", dest="kernel_k", type=int)
    parser.add_argument("--quad-order", dest="quad_order", type=int)
    parser.add_argument("--tol", type=float)
    parser.add_argument("--max-iter", dest="max_iter", type=int)
    parser.add_argument("--samples", type=int, help="output sample count")
    parser.add_argument("--output", help="output file path (default: stdout)")
    parser.add_argument("--format", choices=["csv", "json"])
    parser.add_argument("--no-timestamp", dest="no_timestamp",
                        action="store_const", const=True)
    parser.add_argument("--no-figure", dest="no_figure",
                        action="store_const", const=True,
                        help="skip the companion figure next to --output")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="icsrbf",
        description="Compactly-supported RBF collocation solver for "
                    "Lane-Emden type singular IVPs.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_solve = sub.add_parser("solve", help="run a single collocation solve")
    _add_common(p_solve)
    p_table = sub.add_parser("table", help="reproduce a published benchmark table")
    p_table.add_argument("--id", type=int, required=True,
                         help="table number (2..11)")
    _add_common(p_table)
    p_sweep = sub.add_parser("sweep", help="solve over a list of N values")
    _add_common(p_sweep)
    return parser


def merge_config(args):
    """Layer: defaults < JSON config file < explicit flags."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {args.config}: {exc}")
        unknown = set(file_cfg) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(file_cfg)
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _parse_N(value, allow_list=False):
    if isinstance(value, int):
        return [value] if allow_list else value
    if isinstance(value, (list, tuple)):
        vals = [int(v) for v in value]
    else:
        try:
            vals = [int(v) for v in str(value).split(",") if v.strip()]
        except ValueError:
            raise ConfigError(f"cannot parse N value {value!r}")
    if not vals:
        raise ConfigError("empty N list")
    if not allow_list:
        if len(vals) != 1:
            raise ConfigError("a single N is required here")
        return vals[0]
    return vals


def resolve_problem(cfg):
    name = cfg["problem"]
    if name == "lane-emden":
        if cfg["m"] is None:
            raise ConfigError("lane-emden requires --m")
        return prob_mod.by_name(name, cfg["m"])
    if name == "white-dwarf":
        if cfg["sigma"] is None:
            raise ConfigError("white-dwarf requires --sigma")
        return prob_mod.by_name(name, cfg["sigma"])
    return prob_mod.by_name(name)


def make_setup(cfg, N, gamma):
    kernel = wendland(cfg["kernel_s"], cfg["kernel_k"])
    return CollocationSetup(
        N=N, L=cfg["L"], gamma=gamma, r_omega=cfg["rw"],
        kernel=kernel, quad_order=cfg["quad_order"])


def _timestamp_line(cfg):
    if cfg["no_timestamp"]:
        return None
    return f"# generated {datetime.now(timezone.utc).isoformat()}"


def _open_output(cfg):
    if cfg["output"]:
        return open(cfg["output"], "w", newline=""), True
    return sys.stdout, False


def _figure_path(cfg):
    if cfg["no_figure"] or not cfg["output"]:
        return None
    base, _ = os.path.splitext(cfg["output"])
    return base + ".png"


def cmd_solve(cfg):
    inst = resolve_problem(cfg)
    N = _parse_N(cfg["N"])
    gamma = cfg["gamma"] if cfg["gamma"] is not None else inst.default_gamma
    setup = make_setup(cfg, N, gamma)
    sol = solve(inst.spec, setup, tol=cfg["tol"], max_iter=cfg["max_iter"])
    xs = np.linspace(cfg["L"] / cfg["samples"], cfg["L"], cfg["samples"])
    xs = np.concatenate(([0.0], xs))
    y, dy, d2y, res = sol.y(xs), sol.dy(xs), sol.d2y(xs), sol.res(xs)
    samples = [
        {"x": float(x), "y": float(a), "dy": float(b),
         "d2y": float(c), "res": float(r)}
        for x, a, b, c, r in zip(xs, y, dy, d2y, res)
    ]
    diag = {
        "converged": sol.converged,
        "iterations": sol.diagnostics.iterations,
        "residual_norm": sol.diagnostics.residual_norm,
        "step_norm": sol.diagnostics.step_norm,
        "message": sol.diagnostics.message,
    }
    fh, close = _open_output(cfg)
    try:
        if cfg["format"] == "json":
            doc = {"problem": inst.label, "diagnostics": diag, "samples": samples}
            ts = _timestamp_line(cfg)
            if ts:
                doc["generated"] = ts[len("# generated "):]
            json.dump(doc, fh, indent=2)
            fh.write("\n")
        else:
            ts = _timestamp_line(cfg)
            if ts:
                fh.write(ts + "\n")
            fh.write(f"# problem: {inst.label}\n")
            for k, v in diag.items():
                fh.write(f"# {k}: {v}\n")
            writer = csv.DictWriter(fh, fieldnames=["x", "y", "dy", "d2y", "res"])
            writer.writeheader()
            for s in samples:
                writer.writerow({k: repr(v) for k, v in s.items()})
    finally:
        if close:
            fh.close()
    fig = _figure_path(cfg)
    if fig:
        plots.render_solution(samples, fig, title=inst.label)
    if not sol.converged:
        return _fail(EXIT_SOLVER, "solver did not converge", diag)
    return EXIT_OK


def cmd_table(cfg, table_id):
    if table_id not in analysis.TABLE_IDS:
        raise ConfigError(f"unknown table id {table_id}; valid ids are 2..11")
    reports = analysis.run_table(table_id)
    fh, close = _open_output(cfg)
    try:
        if cfg["format"] == "json":
            fh.write(analysis.reports_to_json(reports))
            fh.write("\n")
        else:
            ts = _timestamp_line(cfg)
            if ts:
                fh.write(ts + "\n")
            analysis.reports_to_csv(reports, fh)
    finally:
        if close:
            fh.close()
    fig = _figure_path(cfg)
    if fig:
        plots.render_table(reports, fig, title=f"benchmark table {table_id}")
    return EXIT_OK


def cmd_sweep(cfg):
    inst = resolve_problem(cfg)
    Ns = _parse_N(cfg["N"], allow_list=True)
    gamma = cfg["gamma"] if cfg["gamma"] is not None else inst.default_gamma
    rows = []
    failures = 0
    for N in Ns:
        row = {"N": N, "res_norm_2": None, "converged": False, "error": ""}
        try:
            setup = make_setup(cfg, N, gamma)
            sol = solve(inst.spec, setup, tol=cfg["tol"],
                        max_iter=cfg["max_iter"])
            row["converged"] = bool(sol.converged)
            row["res_norm_2"] = analysis.res_norm_2(sol)
            if not sol.converged:
                row["error"] = sol.diagnostics.message
                failures += 1
        except IcsrbfError as exc:
            row["error"] = str(exc)
            failures += 1
        rows.append(row)
    fh, close = _open_output(cfg)
    try:
        if cfg["format"] == "json":
            json.dump(rows, fh, indent=2)
            fh.write("\n")
        else:
            ts = _timestamp_line(cfg)
            if ts:
                fh.write(ts + "\n")
            writer = csv.DictWriter(
                fh, fieldnames=["N", "res_norm_2", "converged", "error"])
            writer.writeheader()
            for r in rows:
                out = dict(r)
                if out["res_norm_2"] is not None:
                    out["res_norm_2"] = repr(out["res_norm_2"])
                writer.writerow(out)
    finally:
        if close:
            fh.close()
    fig = _figure_path(cfg)
    if fig:
        plots.render_sweep(rows, fig, title=f"{inst.label}: residual norm vs N")
    if failures == len(Ns):
        return _fail(EXIT_SOLVER, "all sweep points failed")
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = merge_config(args)
        if args.command == "solve":
            N = _parse_N(cfg["N"])
            if N < 2:
                raise ConfigError(f"need at least 2 collocation points, got N={N}")
            return cmd_solve(cfg)
        if args.command == "table":
            return cmd_table(cfg, args.id)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, InvalidParameterError) as exc:
        return _fail(EXIT_CONFIG, str(exc))
    except SolverError as exc:
        return _fail(EXIT_SOLVER, str(exc))


if __name__ == "__main__":
    sys.exit(main())
