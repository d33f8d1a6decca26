"""The five benchmark problem families and their published reference data.

Each factory returns a :class:`ProblemInstance` bundling the general-form
coefficients, the analytic derivative of the nonlinearity (for the Newton
Jacobian), a closed-form solution where one exists, and a truncated
series oracle where one was published.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Optional

import numpy as np

from .core import ProblemSpec
from .errors import DomainError, InvalidParameterError

__all__ = [
    "ProblemInstance",
    "standard_lane_emden",
    "isothermal_gas_sphere",
    "white_dwarf",
    "sinh_problem",
    "sin_problem",
    "by_name",
    "load_references",
    "PROBLEM_NAMES",
]

PROBLEM_NAMES = ("lane-emden", "isothermal", "white-dwarf", "sinh", "sin")


@dataclass(frozen=True)
class ProblemInstance:
    spec: ProblemSpec
    params: dict
    exact: Optional[Callable] = None
    series: Optional[Callable] = None
    series_note: str = ""
    default_gamma: float = 1.5

    @property
    def label(self):
        return self.spec.label


def _zero(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def _one(x):
    return np.ones_like(np.asarray(x, dtype=float))


def standard_lane_emden(m):
    """y'' + (2/x) y' + y^m = 0, y(0)=1, y'(0)=0.

    For non-integer m the power is continued past the first zero as
    sign(y)|y|^m, which is the standard polytropic continuation and keeps
    the collocation system real when nodes lie beyond the zero.
    """
    if m < 0:
        raise InvalidParameterError(f"polytropic index must be >= 0, got {m}")
    m = float(m)
    if m == int(m):
        mi = int(m)

        def qfun(y):
            return np.asarray(y, dtype=float) ** mi

        def dqfun(y):
            y = np.asarray(y, dtype=float)
            if mi == 0:
                return np.zeros_like(y)
            return mi * y ** (mi - 1)
    else:
        def qfun(y):
            y = np.asarray(y, dtype=float)
            return np.sign(y) * np.abs(y) ** m

        def dqfun(y):
            y = np.asarray(y, dtype=float)
            return m * np.abs(y) ** (m - 1.0)

    exact = None
    if m == 0.0:
        exact = lambda x: 1.0 - np.asarray(x, dtype=float) ** 2 / 6.0
    elif m == 1.0:
        def exact(x):
            x = np.asarray(x, dtype=float)
            return np.where(x == 0.0, 1.0, np.sin(x) / np.where(x == 0.0, 1.0, x))
    elif m == 5.0:
        exact = lambda x: (1.0 + np.asarray(x, dtype=float) ** 2 / 3.0) ** -0.5

    spec = ProblemSpec(alpha=2.0, p=_one, qfun=qfun, dqfun=dqfun, h=_zero,
                       A=1.0, B=0.0, label=f"lane-emden m={m:g}")
    return ProblemInstance(spec=spec, params={"m": m}, exact=exact,
                           default_gamma=1.5)


def isothermal_gas_sphere():
    """y'' + (2/x) y' + e^y = 0, y(0)=0, y'(0)=0, with Wazwaz's ADM series."""
    # x^4 numerator is 1, not 2: forced by the ODE's Taylor expansion
    # (20 b = 1/6) and by the tabulated ADM values themselves
    c = [
        -1.0 / 6.0,
        1.0 / (5.0 * math.factorial(4)),
        -8.0 / (21.0 * math.factorial(6)),
        122.0 / (81.0 * math.factorial(8)),
        -(61.0 * 67.0) / (495.0 * math.factorial(10)),
    ]

    def series(x):
        x2 = np.asarray(x, dtype=float) ** 2
        return x2 * (c[0] + x2 * (c[1] + x2 * (c[2] + x2 * (c[3] + x2 * c[4]))))

    spec = ProblemSpec(alpha=2.0, p=_one, qfun=np.exp, dqfun=np.exp, h=_zero,
                       A=0.0, B=0.0, label="isothermal gas sphere")
    return ProblemInstance(spec=spec, params={}, series=series,
                           series_note="ADM series, accurate for x <~ 1",
                           default_gamma=1.7)


def white_dwarf(sigma):
    """y'' + (2/x) y' + (y^2 - sigma)^{3/2} = 0, y(0)=1, y'(0)=0.

    The nonlinearity is real only for y^2 >= sigma; violations raise
    DomainError so the Newton damping can reject the step."""
    if not 0.0 <= sigma < 1.0:
        raise InvalidParameterError(f"sigma must be in [0, 1), got {sigma}")
    sigma = float(sigma)
    w = math.sqrt(1.0 - sigma)

    def qfun(y):
        y = np.asarray(y, dtype=float)
        base = y * y - sigma
        if np.any(base < 0.0):
            i = int(np.argmax(base < 0.0))
            raise DomainError(
                f"(y^2 - sigma) negative: y={y.flat[i]:.6g}, sigma={sigma}",
                y=float(y.flat[i]),
            )
        return base ** 1.5

    def dqfun(y):
        y = np.asarray(y, dtype=float)
        base = y * y - sigma
        if np.any(base < 0.0):
            i = int(np.argmax(base < 0.0))
            raise DomainError(
                f"(y^2 - sigma) negative: y={y.flat[i]:.6g}, sigma={sigma}",
                y=float(y.flat[i]),
            )
        return 3.0 * y * np.sqrt(base)

    def series(x):
        x2 = np.asarray(x, dtype=float) ** 2
        return (1.0 - w**3 / 6.0 * x2 + w**4 / 40.0 * x2**2
                - w**5 * (5.0 * w**2 + 14.0) / math.factorial(7) * x2**3)

    spec = ProblemSpec(alpha=2.0, p=_one, qfun=qfun, dqfun=dqfun, h=_zero,
                       A=1.0, B=0.0, label=f"white dwarf sigma={sigma:g}")
    return ProblemInstance(spec=spec, params={"sigma": sigma}, series=series,
                           series_note="MHAM series, accurate for small x",
                           default_gamma=1.5)


def sinh_problem():
    """y'' + (2/x) y' + sinh(y) = 0, y(0)=1, y'(0)=0, with Wazwaz's series."""
    e = math.e

    def series(x):
        x2 = np.asarray(x, dtype=float) ** 2
        return (1.0
                - (e**2 - 1.0) / (12.0 * e) * x2
                + (e**4 - 1.0) / (480.0 * e**2) * x2**2
                - (2.0 * e**6 + 3.0 * e**2 - 3.0 * e**4 - 2.0) / (30240.0 * e**3) * x2**3
                + (16.0 * e**8 - 104.0 * e**6 + 104.0 * e**2 - 61.0)
                / (26127360.0 * e**4) * x2**4)

    spec = ProblemSpec(alpha=2.0, p=_one, qfun=np.sinh, dqfun=np.cosh, h=_zero,
                       A=1.0, B=0.0, label="sinh nonlinearity")
    return ProblemInstance(spec=spec, params={}, series=series,
                           series_note="ADM series, accurate for x <~ 1",
                           default_gamma=1.7)


def sin_problem():
    """y'' + (2/x) y' + sin(y) = 0, y(0)=1, y'(0)=0, with Wazwaz's series."""
    k1 = math.sin(1.0)
    k2 = math.cos(1.0)

    def series(x):
        x2 = np.asarray(x, dtype=float) ** 2
        return (1.0
                - k1 / 6.0 * x2
                + k1 * k2 / 120.0 * x2**2
                + k1 * (k1**2 / 3024.0 - k2**2 / 5040.0) * x2**3
                + k1 * k2 * (-113.0 * k1**2 / 3265920.0 + k2**2 / 362880.0) * x2**4)

    spec = ProblemSpec(alpha=2.0, p=_one, qfun=np.sin, dqfun=np.cos, h=_zero,
                       A=1.0, B=0.0, label="sin nonlinearity")
    return ProblemInstance(spec=spec, params={}, series=series,
                           series_note="ADM series, accurate for x <~ 1",
                           default_gamma=1.6)


def by_name(name, param=None):
    """Problem factory lookup used by the CLI: name in PROBLEM_NAMES,
    param is m (lane-emden) or sigma (white-dwarf)."""
    if name == "lane-emden":
        if param is None:
            raise InvalidParameterError("lane-emden requires the index m")
        return standard_lane_emden(param)
    if name == "isothermal":
        return isothermal_gas_sphere()
    if name == "white-dwarf":
        if param is None:
            raise InvalidParameterError("white-dwarf requires sigma")
        return white_dwarf(param)
    if name == "sinh":
        return sinh_problem()
    if name == "sin":
        return sin_problem()
    raise InvalidParameterError(
        f"unknown problem {name!r}; expected one of {', '.join(PROBLEM_NAMES)}"
    )


# ---------------------------------------------------------------------------
# published reference values

def _reference_path():
    override = os.environ.get("ICSRBF_REF_DIR")
    if override:
        return os.path.join(override, "reference_tables.csv")
    return resources.files("icsrbf.data") / "reference_tables.csv"


def load_references(table_id=None, problem=None, source=None):
    """Rows from the shipped reference CSV, optionally filtered.

    Columns: problem, param, x, y_ref, source, table_id.  ``param`` and
    ``x`` are empty for rows where they do not apply (first zeros, metric
    tables keyed by N are stored with x = N).
    """
    path = _reference_path()
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            row = {
                "problem": rec["problem"],
                "param": float(rec["param"]) if rec["param"] else None,
                "x": float(rec["x"]) if rec["x"] else None,
                "y_ref": float(rec["y_ref"]),
                "source": rec["source"],
                "table_id": int(rec["table_id"]),
            }
            if table_id is not None and row["table_id"] != table_id:
                continue
            if problem is not None and row["problem"] != problem:
                continue
            if source is not None and row["source"] != source:
                continue
            rows.append(row)
    return rows
