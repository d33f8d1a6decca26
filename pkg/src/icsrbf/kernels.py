"""Wendland compactly supported radial basis functions.

Kernels are generated in exact rational arithmetic: starting from the
truncated power (1-r)^l and repeatedly applying the montee operator
I[p](r) = int_r^1 t p(t) dt.  The resulting polynomial is normalized so
the kernel value at r=0 is exactly 1 (the family is only defined up to a
positive constant; coefficients of the expansion absorb any rescaling).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import InvalidParameterError, SmoothnessError

__all__ = [
    "WendlandKernel",
    "ScaledKernel",
    "PiecewisePoly",
    "truncated_power",
    "montee",
    "wendland",
    "basis_matrix",
    "interpolation_matrix",
]


# ---------------------------------------------------------------------------
# exact polynomial helpers (coefficients ascending, Fraction entries)

def _poly_eval(coeffs, r):
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * r + c
    return acc


def _poly_deriv(coeffs):
    return tuple(i * c for i, c in enumerate(coeffs))[1:] or (Fraction(0),)


def _poly_antideriv(coeffs):
    # antiderivative vanishing at 0
    return (Fraction(0),) + tuple(c / (i + 1) for i, c in enumerate(coeffs))


def truncated_power(l):
    """Exact coefficients of (1-r)^l on [0,1], ascending order."""
    if l < 1:
        raise InvalidParameterError(f"truncated power needs l >= 1, got {l}")
    return tuple(Fraction(math.comb(l, i) * (-1) ** i) for i in range(l + 1))


def montee(coeffs):
    """Apply the montee operator: r -> int_r^1 t p(t) dt, exactly."""
    shifted = (Fraction(0),) + tuple(coeffs)  # t * p(t)
    F = _poly_antideriv(shifted)
    F1 = _poly_eval(F, Fraction(1))
    out = [F1 - F[0]] + [-c for c in F[1:]]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class WendlandKernel:
    """Compactly supported kernel phi_{s,k}, stored as exact coefficients.

    ``coeffs`` are the ascending rational coefficients of the polynomial
    part on [0,1]; the kernel is zero for r >= 1 and equals 1 at r = 0.
    """

    s: int
    k: int
    l: int
    coeffs: tuple

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def smoothness(self):
        """Highest continuous derivative order (the kernel is C^{2k})."""
        return 2 * self.k

    def _float_coeffs(self, deriv):
        c = self.coeffs
        for _ in range(deriv):
            c = _poly_deriv(c)
        return np.array([float(v) for v in c])

    def profile(self, r, deriv=0):
        """Evaluate d^deriv/dr^deriv of the radial profile at r >= 0.

        Zero outside [0,1).  deriv must not exceed 2k.
        """
        if deriv > self.smoothness:
            raise SmoothnessError(
                f"phi_{{{self.s},{self.k}}} is C^{self.smoothness}; "
                f"derivative order {deriv} not available"
            )
        c = self._coeff_cache.get(deriv)
        if c is None:
            c = self._float_coeffs(deriv)
            self._coeff_cache[deriv] = c
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r1 = np.atleast_1d(r)
        out = np.zeros_like(r1)
        inside = r1 < 1.0
        if np.any(inside):
            out[inside] = np.polynomial.polynomial.polyval(r1[inside], c)
        return float(out[0]) if scalar else out.reshape(r.shape)

    @property
    def _coeff_cache(self):
        cache = self.__dict__.get("_cc")
        if cache is None:
            object.__setattr__(self, "_cc", {})
            cache = self.__dict__["_cc"]
        return cache


@lru_cache(maxsize=None)
def wendland(s, k):
    """Construct phi_{s,k} = I^k (1-r)^l with l = floor(s/2)+k+1, normalized
    to value 1 at r = 0."""
    if s < 1:
        raise InvalidParameterError(f"space dimension must be >= 1, got {s}")
    if k < 0:
        raise InvalidParameterError(f"smoothness parameter must be >= 0, got {k}")
    l = s // 2 + k + 1
    coeffs = truncated_power(l)
    for _ in range(k):
        coeffs = montee(coeffs)
    at0 = coeffs[0]
    coeffs = tuple(c / at0 for c in coeffs)
    return WendlandKernel(s=s, k=k, l=l, coeffs=coeffs)


# ---------------------------------------------------------------------------
# piecewise polynomials in shifted/scaled local coordinates
#
# Each piece stores ascending coefficients in u = (t - center) / scale, so
# antiderivatives stay in the same representation (d t = scale * d u) and
# no ill-conditioned re-expansion in powers of t is ever needed.

@dataclass(frozen=True)
class _LocalPoly:
    coeffs: tuple
    center: float
    scale: float

    def __call__(self, t):
        u = (np.asarray(t, dtype=float) - self.center) / self.scale
        acc = np.zeros_like(u)
        for c in reversed(self.coeffs):
            acc = acc * u + c
        return acc

    def integ(self):
        # antiderivative w.r.t. t, vanishing at t = center (u = 0)
        new = (0.0,) + tuple(
            self.scale * c / (i + 1) for i, c in enumerate(self.coeffs)
        )
        return _LocalPoly(new, self.center, self.scale)

    def shift(self, const):
        new = (self.coeffs[0] + const,) + self.coeffs[1:]
        return _LocalPoly(new, self.center, self.scale)


class PiecewisePoly:
    """Piecewise polynomial on [breaks[0], inf).

    pieces[i] is valid on [breaks[i], breaks[i+1]); the last piece extends
    to +inf (for kernel integrals it is the constant plateau / linear tail).
    """

    def __init__(self, breaks, pieces):
        self.breaks = np.asarray(breaks, dtype=float)
        self.pieces = list(pieces)
        if len(self.pieces) != len(self.breaks):
            raise ValueError("need one piece per break")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        idx = np.searchsorted(self.breaks, x, side="right") - 1
        idx = np.clip(idx, 0, len(self.pieces) - 1)
        out = np.empty_like(x)
        for i in np.unique(idx):
            sel = idx == i
            out[sel] = self.pieces[i](x[sel])
        return float(out[0]) if scalar else out

    def antiderivative(self):
        """Antiderivative vanishing at breaks[0], continuous across breaks."""
        new_pieces = []
        running = 0.0
        for i, p in enumerate(self.pieces):
            F = p.integ()
            F = F.shift(running - float(F(self.breaks[i])))
            new_pieces.append(F)
            if i + 1 < len(self.breaks):
                running = float(F(self.breaks[i + 1]))
        return PiecewisePoly(self.breaks, new_pieces)


@dataclass(frozen=True)
class ScaledKernel:
    """A Wendland kernel translated to ``center`` and scaled to support
    radius ``r_omega``: x -> phi(|x - center| / r_omega)."""

    base: WendlandKernel
    r_omega: float
    center: float

    def __post_init__(self):
        if self.r_omega <= 0:
            raise InvalidParameterError(
                f"support radius must be positive, got {self.r_omega}"
            )

    def eval(self, x, deriv=0):
        """d^deriv/dx^deriv of the scaled kernel; zero outside the support.

        At x == center odd derivatives are 0 (the kernel is even and, for
        k >= 1, smooth there).
        """
        if deriv > 2:
            raise SmoothnessError("only derivatives up to order 2 are supported")
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        u = (np.atleast_1d(x) - self.center) / self.r_omega
        r = np.abs(u)
        vals = self.base.profile(r, deriv) / self.r_omega**deriv
        if deriv == 1:
            vals = vals * np.sign(u)
        return float(vals[0]) if scalar else vals

    def __call__(self, x):
        return self.eval(x, 0)

    def piecewise(self):
        """The kernel as an exact-coefficient piecewise polynomial on [0, inf)."""
        c = tuple(float(v) for v in self.base.coeffs)
        lo = self.center - self.r_omega
        hi = self.center + self.r_omega
        zero = lambda ctr: _LocalPoly((0.0,), ctr, 1.0)
        left = _LocalPoly(c, self.center, -self.r_omega)   # u = (center-t)/r_omega
        right = _LocalPoly(c, self.center, self.r_omega)
        breaks = [0.0]
        pieces = []
        if lo > 0.0:
            pieces.append(zero(0.0))
            breaks.append(lo)
        pieces.append(left)
        if self.center > 0.0:
            breaks.append(self.center)
            pieces.append(right)
        else:
            pieces[-1] = right  # support starts past the center
        breaks.append(hi)
        pieces.append(zero(hi))
        return PiecewisePoly(breaks, pieces)

    def antiderivative(self):
        """x -> int_0^x phi(t) dt as a piecewise polynomial (plateau past
        the right support edge)."""
        return self.piecewise().antiderivative()


# ---------------------------------------------------------------------------
# interpolation systems

def basis_matrix(points, centers, r_omega, kernel, deriv=0):
    """Matrix of basis values: entry (j, i) = d^deriv phi(|x_j - c_i|/r_omega)."""
    points = np.asarray(points, dtype=float)
    centers = np.asarray(centers, dtype=float)
    u = (points[:, None] - centers[None, :]) / r_omega
    r = np.abs(u)
    vals = kernel.profile(r, deriv) / r_omega**deriv
    if deriv == 1:
        vals = vals * np.sign(u)
    return vals


def interpolation_matrix(centers, points, r_omega, kernel):
    """Scattered-data interpolation matrix A with A[j, i] = phi_i(x_j).

    When points coincide with centers the matrix is symmetric positive
    definite for strictly positive definite kernels.
    """
    points = np.asarray(points, dtype=float)
    centers = np.asarray(centers, dtype=float)
    if len(points) != len(centers):
        raise InvalidParameterError("centers and points must have equal length")
    same = len(points) == len(centers) and np.array_equal(points, centers)
    if same and len(np.unique(points)) != len(points):
        raise InvalidParameterError(
            "duplicate collocation points make the interpolation matrix singular"
        )
    return basis_matrix(points, centers, r_omega, kernel, deriv=0)
