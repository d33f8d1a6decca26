"""Indirect compactly-supported RBF collocation solver for Lane-Emden
type singular initial value problems."""

from .core import (
    CollocationSetup,
    ProblemSpec,
    Solution,
    assemble_system,
    make_grid,
    residual,
    solve,
)
from .kernels import ScaledKernel, WendlandKernel, interpolation_matrix, wendland
from .quadrature import QuadratureRule, gauss_legendre, integrate_to
from . import analysis, problems

__all__ = [
    "CollocationSetup",
    "ProblemSpec",
    "Solution",
    "WendlandKernel",
    "ScaledKernel",
    "QuadratureRule",
    "wendland",
    "interpolation_matrix",
    "gauss_legendre",
    "integrate_to",
    "make_grid",
    "residual",
    "assemble_system",
    "solve",
    "analysis",
    "problems",
]

__version__ = "0.1.0"
