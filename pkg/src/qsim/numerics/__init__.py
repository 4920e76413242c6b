"""Shared small-dimension numerics — RK4 kernel, complex matrix helpers, eig4."""

from qsim.numerics.linalg import EigenSolverError, adjoint, as_complex_matrix, eig4
from qsim.numerics.rk4 import linear_step_propagator, rk4_step

__all__ = [
    "EigenSolverError",
    "adjoint",
    "as_complex_matrix",
    "eig4",
    "linear_step_propagator",
    "rk4_step",
]
