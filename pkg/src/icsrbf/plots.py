"""Matplotlib rendering for the CLI report paths.

Figures are written next to the delimited output; all plotting is
file-based (Agg backend), no interactive windows.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["render_solution", "render_table", "render_sweep"]


def render_solution(samples, path, title=""):
    """Plot y, y', y'' and the residual from solve output samples
    (list of dicts with keys x, y, dy, d2y, res)."""
    x = np.array([s["x"] for s in samples])
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 7), sharex=True)
    ax1.plot(x, [s["y"] for s in samples], label="y")
    ax1.plot(x, [s["dy"] for s in samples], label="y'", alpha=0.7)
    ax1.plot(x, [s["d2y"] for s in samples], label="y''", alpha=0.7)
    ax1.axhline(0.0, color="k", lw=0.5)
    ax1.legend()
    ax1.set_ylabel("value")
    if title:
        ax1.set_title(title)
    ax2.semilogy(x, np.abs([s["res"] for s in samples]) + 1e-300)
    ax2.set_xlabel("x")
    ax2.set_ylabel("|Res(x)|")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_table(reports, path, title=""):
    """Computed-vs-reference scatter for a benchmark table run."""
    rows = [r for r in reports if r.value is not None and r.reference is not None]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 7))
    idx = np.arange(len(rows))
    ax1.plot(idx, [r.value for r in rows], "o-", label="computed")
    ax1.plot(idx, [r.reference for r in rows], "x--", label="reference")
    ax1.set_ylabel("value")
    ax1.legend()
    if title:
        ax1.set_title(title)
    errs = [r.abs_error if r.abs_error else 0.0 for r in rows]
    ax2.semilogy(idx, np.array(errs) + 1e-300, "s-")
    ax2.set_xlabel("row")
    ax2.set_ylabel("|computed - reference|")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_sweep(rows, path, title=""):
    """Residual-norm-vs-N convergence plot for sweep output rows
    (dicts with keys N, res_norm_2)."""
    ok = [r for r in rows if r.get("res_norm_2") is not None]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.semilogy([r["N"] for r in ok], [r["res_norm_2"] for r in ok], "o-")
    ax.set_xlabel("N")
    ax.set_ylabel(r"$\|Res\|_2$")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
