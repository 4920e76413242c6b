"""Small dense complex linear algebra.

Everything in this package works on numpy ``complex128`` arrays. Matrices are
never larger than 8x8 (5x5 system operators, 4x4 two-qubit states), so there is
no blocking or sparsity anywhere.
"""

from __future__ import annotations

import logging

import numpy as np
from numpy.typing import ArrayLike, NDArray

logger = logging.getLogger(__name__)

ComplexMatrix = NDArray[np.complex128]

MAX_DIM = 8


class EigenSolverError(RuntimeError):
    """The eigensolver failed to converge or was handed non-finite entries."""


def as_complex_matrix(entries: ArrayLike, shape: tuple[int, int] | None = None) -> ComplexMatrix:
    """Copy ``entries`` into a read-only complex128 matrix.

    Raises ValueError for non-2D input, a shape mismatch, dimensions above
    MAX_DIM, or non-finite entries.
    """
    m = np.array(entries, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"Expected a 2D matrix, got ndim={m.ndim}")
    if shape is not None and m.shape != shape:
        raise ValueError(f"Expected shape {shape}, got {m.shape}")
    if max(m.shape) > MAX_DIM or min(m.shape) < 1:
        raise ValueError(f"Matrix dimensions must be in 1..{MAX_DIM}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("Matrix has non-finite entries")
    m.setflags(write=False)
    return m


def adjoint(m: NDArray[np.complexfloating]) -> NDArray[np.complexfloating]:
    """Conjugate transpose over the last two axes (works on stacks of matrices)."""
    return np.conj(np.swapaxes(m, -1, -2))


def hermiticity_error(m: NDArray[np.complexfloating]) -> float:
    """max |m - m^dagger| entry."""
    return float(np.max(np.abs(m - adjoint(m)))) if m.size else 0.0


def eig4(m: ArrayLike) -> NDArray[np.complex128]:
    """Eigenvalues of a general complex 4x4 matrix, unordered.

    Delegates to LAPACK's nonsymmetric QR iteration (``numpy.linalg.eigvals``).
    LAPACK non-convergence surfaces as EigenSolverError instead of LinAlgError.
    """
    a = np.asarray(m, dtype=np.complex128)
    if a.shape != (4, 4):
        raise ValueError(f"eig4 expects a 4x4 matrix, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise EigenSolverError("eig4: matrix has non-finite entries")
    try:
        return np.linalg.eigvals(a)
    except np.linalg.LinAlgError as e:
        logger.warning("eig4 failed to converge: %s", e)
        raise EigenSolverError(f"eig4 did not converge: {e}") from e
