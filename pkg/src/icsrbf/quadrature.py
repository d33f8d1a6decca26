"""Gauss-Legendre quadrature rules and the mapped integral operator
int_0^x f(t) dt = (x/2) * sum_j w_j f(x/2 * eta_j + x/2)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidParameterError, SolverError

__all__ = ["QuadratureRule", "legendre_eval", "gauss_legendre", "integrate_to"]


def legendre_eval(q, x):
    """Legendre polynomial P_q and its derivative at x, by the three-term
    recurrence.  Accepts scalars or arrays."""
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if q == 0:
        return p_prev, np.zeros_like(x)
    p = x.copy()
    for n in range(1, q):
        p, p_prev = ((2 * n + 1) * x * p - n * p_prev) / (n + 1), p
    # (1 - x^2) P_q' = q (P_{q-1} - x P_q); endpoints via the known limit
    denom = 1.0 - x * x
    with np.errstate(divide="ignore", invalid="ignore"):
        dp = np.where(denom != 0.0, q * (p_prev - x * p) / denom, 0.0)
    at_end = denom == 0.0
    if np.any(at_end):
        sgn = np.sign(x)
        dp = np.where(at_end, sgn ** (q - 1) * q * (q + 1) / 2.0, dp)
    return p, dp


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre rule of order q on [-1, 1]."""

    q: int
    nodes: np.ndarray
    weights: np.ndarray


@lru_cache(maxsize=None)
def gauss_legendre(q):
    """Gauss-Legendre rule: nodes are the q roots of P_q (Newton iteration
    from Chebyshev initial guesses), weights 2 / ((1 - x^2) P_q'(x)^2)."""
    if q < 1:
        raise InvalidParameterError(f"quadrature order must be >= 1, got {q}")
    i = np.arange(1, q + 1)
    x = np.cos(np.pi * (4 * i - 1) / (4 * q + 2))
    for it in range(100):
        p, dp = legendre_eval(q, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    else:
        raise SolverError(f"Legendre root search failed to converge for q={q}")
    x = np.sort(x)
    x = (x - x[::-1]) / 2.0  # enforce exact symmetry about 0
    _, dp = legendre_eval(q, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadratureRule(q=q, nodes=x, weights=w)


def integrate_to(f, x, rule, breakpoints=None):
    """Approximate int_0^x f(t) dt with the mapped Gauss-Legendre rule.

    ``f`` must accept numpy arrays.  With ``breakpoints`` the interval is
    split there (composite rule), restoring full accuracy across kernel
    support joints; the default single panel mirrors the solver's
    construction.
    """
    if x < 0:
        raise InvalidParameterError(f"upper limit must be >= 0, got {x}")
    if x == 0:
        return 0.0
    if breakpoints is None:
        edges = np.array([0.0, x])
    else:
        inner = np.asarray(
            [b for b in breakpoints if 0.0 < b < x], dtype=float
        )
        edges = np.unique(np.concatenate(([0.0, x], inner)))
    total = 0.0
    half = (rule.nodes + 1.0) / 2.0
    for a, b in zip(edges[:-1], edges[1:]):
        pts = a + (b - a) * half
        total += (b - a) / 2.0 * float(np.dot(rule.weights, f(pts)))
    return total
