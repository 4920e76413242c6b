"""Reduced two-qubit states and their concurrence.

Tracing the 5-state system over the cavities leaves the atom pair; tracing
over the atoms leaves the cavity pair. In both cases the single-excitation
structure maps each basis state to a product state:

    over cavities:  a -> |1,0>, c -> |0,1>, b, d, e -> |0,0>
    over atoms:     b -> |1,0>, d -> |0,1>, a, c, e -> |0,0>

Two basis states keep their coherence in the reduced state only if their
traced-out parts coincide; e shares the traced-out vacuum/ground with both
qubit-excited states, so rho[a, e] and rho[c, e] survive over the cavities.
"""

from __future__ import annotations

import logging

import numpy as np
from numpy.typing import NDArray

from qsim.model.states import A, B, C, D, DensityMatrix5, E, QubitPairDensity
from qsim.numerics.linalg import eig4

logger = logging.getLogger(__name__)

# Two-qubit product basis indices
Q00, Q01, Q10, Q11 = range(4)

SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_YY = np.kron(SIGMA_Y, SIGMA_Y)

IMAG_TOL = 1e-9
# eigenvalues of rho * rho_tilde below this fraction of the largest are round-off zeros
EIG_NOISE_FLOOR = 1e-12


def _reduce(
    rho: NDArray[np.complex128],
    excited: dict[int, int],
    ground_members: tuple[int, ...],
    shared_ground: int,
) -> NDArray[np.complex128]:
    """Collapse a 5x5 matrix onto 4x4.

    excited maps system index -> qubit index for the two single-excitation
    states; ground_members all land on |0,0>; shared_ground is the member of
    ground_members whose traced-out part matches the excited states'.
    """
    out = np.zeros((4, 4), dtype=np.complex128)
    for i, qi in excited.items():
        for j, qj in excited.items():
            out[qi, qj] = rho[i, j]
        out[qi, Q00] = rho[i, shared_ground]
        out[Q00, qi] = rho[shared_ground, i]
    out[Q00, Q00] = sum(rho[k, k] for k in ground_members)
    return out


def partial_trace_cavities(rho: DensityMatrix5) -> QubitPairDensity:
    """Atom-pair state rho_at = Tr_cav[rho]."""
    m = rho.entries
    return QubitPairDensity(_reduce(m, {A: Q10, C: Q01}, (B, D, E), E), "atoms", rho.t)


def partial_trace_atoms(rho: DensityMatrix5) -> QubitPairDensity:
    """Cavity-pair state rho_cav = Tr_at[rho]."""
    m = rho.entries
    return QubitPairDensity(_reduce(m, {B: Q10, D: Q01}, (A, C, E), E), "cavities", rho.t)


def concurrence(rho: QubitPairDensity) -> float:
    """Wootters concurrence max(0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4)).

    l_i are the eigenvalues, sorted descending, of rho (sy x sy) rho* (sy x sy).
    """
    m = rho.entries
    spin_flipped = SIGMA_YY @ m.conj() @ SIGMA_YY
    lam = eig4(m @ spin_flipped)
    worst_imag = float(np.max(np.abs(lam.imag)))
    if worst_imag > IMAG_TOL:
        raise ValueError(
            f"rho * rho_tilde has complex eigenvalues (|Im| up to {worst_imag:.3e}); "
            "input is not a valid two-qubit state"
        )
    lam = lam.real
    lam = np.where(lam < EIG_NOISE_FLOOR * max(float(lam.max()), 0.0), 0.0, lam)
    roots = np.sqrt(lam)
    roots = np.sort(roots)[::-1]
    return float(np.clip(roots[0] - roots[1:].sum(), 0.0, 1.0))


def _check_norm(x, y) -> None:
    if np.any(np.abs(x) ** 2 + np.abs(y) ** 2 > 1 + 1e-9):
        raise ValueError("amplitudes exceed unit norm")


def concurrence_atoms_closed(alpha: complex, gamma: complex) -> float | NDArray[np.float64]:
    """2|alpha||gamma|: atom-pair concurrence of the single-excitation mixture."""
    _check_norm(alpha, gamma)
    value = 2 * np.abs(alpha) * np.abs(gamma)
    return float(value) if np.ndim(value) == 0 else value


def concurrence_cavities_closed(beta: complex, delta: complex) -> float | NDArray[np.float64]:
    """2|beta||delta|: cavity-pair concurrence of the single-excitation mixture."""
    _check_norm(beta, delta)
    value = 2 * np.abs(beta) * np.abs(delta)
    return float(value) if np.ndim(value) == 0 else value
