"""Hamiltonian, jump operators and effective Hamiltonian as explicit 5x5 matrices.

Matrix element [i, j] is <i|X|j> in the fixed basis (|a>, |b>, |c>, |d>, |e>).

Jump operators:
    J1 = sqrt(kappa_a) a + sqrt(kappa_b) e^{-i phi} b   photon leaving through the output mirrors
    J2 = sqrt(kappa'_a) a,  J3 = sqrt(kappa'_b) b       mirror absorption / scattering
    J4 = sqrt(Gamma_a) A01, J5 = sqrt(Gamma_b) B01      atomic spontaneous emission

Every J_i sends {a, b, c, d} to e and annihilates e.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from numpy.typing import NDArray

from qsim.model.params import SystemParams, derived_rates
from qsim.model.states import A, B, C, D, E
from qsim.numerics.linalg import adjoint, as_complex_matrix


class OperatorLabel(StrEnum):
    H = "H"
    H_EFF = "H_eff"
    J1 = "J1"
    J2 = "J2"
    J3 = "J3"
    J4 = "J4"
    J5 = "J5"


JUMP_LABELS = (
    OperatorLabel.J1,
    OperatorLabel.J2,
    OperatorLabel.J3,
    OperatorLabel.J4,
    OperatorLabel.J5,
)


@dataclass(frozen=True)
class OperatorMatrix:
    entries: NDArray[np.complex128]
    label: OperatorLabel

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", as_complex_matrix(self.entries, (5, 5)))

    def __getitem__(self, index: tuple[int, int]) -> complex:
        return complex(self.entries[index])


def build_hamiltonian(params: SystemParams) -> OperatorMatrix:
    """Two Jaynes-Cummings nodes plus the cascade coupling term.

    The cascade term i(sqrt(kappa_a kappa_b)/2)(e^{-i phi} b a^dag - e^{i phi} b^dag a)
    connects |b> and |d> only; b a^dag |d> = |b>.
    """
    h = np.zeros((5, 5), dtype=np.complex128)
    h[A, A] = params.delta_a
    h[C, C] = params.delta_b
    h[A, B] = h[B, A] = params.g_a
    h[C, D] = h[D, C] = params.g_b
    half = math.sqrt(params.kappa_a * params.kappa_b) / 2
    h[B, D] = 1j * half * cmath.exp(-1j * params.phi)
    h[D, B] = -1j * half * cmath.exp(1j * params.phi)
    return OperatorMatrix(h, OperatorLabel.H)


def build_jump_operators(params: SystemParams) -> list[OperatorMatrix]:
    """[J1, ..., J5], each nonzero only in row e."""
    entries = {
        OperatorLabel.J1: [
            (B, math.sqrt(params.kappa_a)),
            (D, math.sqrt(params.kappa_b) * cmath.exp(-1j * params.phi)),
        ],
        OperatorLabel.J2: [(B, math.sqrt(params.kappa_prime_a))],
        OperatorLabel.J3: [(D, math.sqrt(params.kappa_prime_b))],
        OperatorLabel.J4: [(A, math.sqrt(params.gamma_a))],
        OperatorLabel.J5: [(C, math.sqrt(params.gamma_b))],
    }
    ops = []
    for label in JUMP_LABELS:
        j = np.zeros((5, 5), dtype=np.complex128)
        for col, value in entries[label]:
            j[E, col] = value
        ops.append(OperatorMatrix(j, label))
    return ops


def jump_stack(params: SystemParams) -> NDArray[np.complex128]:
    """Jump operators as one (5, 5, 5) array, J1 first."""
    return np.stack([j.entries for j in build_jump_operators(params)])


def build_effective_hamiltonian(params: SystemParams) -> OperatorMatrix:
    """H_eff = H - (i/2) sum_i J_i^dag J_i, written out element by element.

    Only H_eff[d, b] carries the cascade: node B is driven by node A and
    never drives it back, so H_eff[b, d] = 0.
    """
    K_a, K_b = derived_rates(params)
    h = np.zeros((5, 5), dtype=np.complex128)
    h[A, A] = params.delta_a - 0.5j * params.gamma_a
    h[B, B] = -0.5j * K_a
    h[C, C] = params.delta_b - 0.5j * params.gamma_b
    h[D, D] = -0.5j * K_b
    h[A, B] = h[B, A] = params.g_a
    h[C, D] = h[D, C] = params.g_b
    h[D, B] = -1j * math.sqrt(params.kappa_a * params.kappa_b) * cmath.exp(1j * params.phi)
    return OperatorMatrix(h, OperatorLabel.H_EFF)


def jump_norm_operator(params: SystemParams) -> NDArray[np.complex128]:
    """sum_i J_i^dag J_i."""
    js = jump_stack(params)
    return np.einsum("kij,kjl->il", adjoint(js), js)
