"""State containers — no-jump amplitudes, 5x5 system density, 4x4 two-qubit density.

Basis of the single-excitation space, fixed everywhere as indices 0..4:

    |a> = atom A excited          |b> = photon in cavity A
    |c> = atom B excited          |d> = photon in cavity B
    |e> = joint ground state (no excitation)

Two-qubit reduced states use the product basis (|0,0>, |0,1>, |1,0>, |1,1>),
the first label belonging to node A.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from qsim.numerics.linalg import hermiticity_error

A, B, C, D, E = range(5)
BASIS_LABELS = ("a", "b", "c", "d", "e")

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-9
PSD_FLOOR = -1e-9


class StateError(ValueError):
    """A state violates its invariants where a valid state is required."""


def _readonly(a: ArrayLike, shape: tuple[int, int]) -> NDArray[np.complex128]:
    m = np.array(a, dtype=np.complex128)
    if m.shape != shape:
        raise StateError(f"Expected a {shape} matrix, got {m.shape}")
    m.setflags(write=False)
    return m


def _state_problems(m: NDArray[np.complex128]) -> list[str]:
    problems = []
    herm = hermiticity_error(m)
    if herm > HERMITIAN_TOL:
        problems.append(f"not Hermitian (max deviation {herm:.3e})")
    drift = abs(np.trace(m).real - 1.0)
    if drift > TRACE_TOL:
        problems.append(f"trace off by {drift:.3e}")
    # eigvalsh reads only one triangle, so check it after Hermiticity.
    if herm <= HERMITIAN_TOL:
        lam_min = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])
        if lam_min < PSD_FLOOR:
            problems.append(f"negative eigenvalue {lam_min:.3e}")
    return problems


@dataclass(frozen=True)
class AmplitudeState:
    """No-jump amplitudes (alpha, beta, gamma, delta) plus the jump weight |eps|^2.

    Fields are complex scalars, or equally shaped numpy arrays when the state is
    evaluated on a whole time grid at once. eps_sq is stored rather than derived
    so a state stays self-consistent after averaging.
    """

    t: float | NDArray[np.float64]
    alpha: complex | NDArray[np.complex128]
    beta: complex | NDArray[np.complex128]
    gamma: complex | NDArray[np.complex128]
    delta: complex | NDArray[np.complex128]
    eps_sq: float | NDArray[np.float64]

    def __post_init__(self) -> None:
        p_no = self.populations()[:4].sum(axis=0)
        if np.any(np.abs(self.eps_sq - (1.0 - p_no)) > TRACE_TOL):
            raise StateError(
                "eps_sq must equal 1 - (|alpha|^2 + |beta|^2 + |gamma|^2 + |delta|^2)"
            )
        if np.any(p_no > 1.0 + TRACE_TOL) or np.any(np.asarray(self.eps_sq) < 0):
            raise StateError("amplitude populations exceed unit norm")

    @classmethod
    def from_amplitudes(cls, t, alpha, beta, gamma, delta) -> AmplitudeState:
        """Build a state, deriving eps_sq = 1 - p_no (clipped to [0, 1])."""
        p_no = abs(alpha) ** 2 + abs(beta) ** 2 + abs(gamma) ** 2 + abs(delta) ** 2
        eps_sq = np.clip(1.0 - p_no, 0.0, 1.0)
        if np.ndim(eps_sq) == 0:
            eps_sq = float(eps_sq)
        return cls(t=t, alpha=alpha, beta=beta, gamma=gamma, delta=delta, eps_sq=eps_sq)

    @classmethod
    def initial(cls) -> AmplitudeState:
        """All excitation in atom A at t = 0."""
        return cls(t=0.0, alpha=1.0 + 0j, beta=0j, gamma=0j, delta=0j, eps_sq=0.0)

    @classmethod
    def stack(cls, states: list[AmplitudeState]) -> AmplitudeState:
        """One batched state from a list of scalar samples."""
        if not states:
            raise StateError("cannot stack an empty list of states")
        return cls(
            t=np.array([s.t for s in states], dtype=np.float64),
            alpha=np.array([s.alpha for s in states], dtype=np.complex128),
            beta=np.array([s.beta for s in states], dtype=np.complex128),
            gamma=np.array([s.gamma for s in states], dtype=np.complex128),
            delta=np.array([s.delta for s in states], dtype=np.complex128),
            eps_sq=np.array([s.eps_sq for s in states], dtype=np.float64),
        )

    def populations(self) -> NDArray[np.float64]:
        """Occupation probabilities (p_a, p_b, p_c, p_d, p_e) stacked on axis 0."""
        return np.array(
            [
                np.abs(self.alpha) ** 2,
                np.abs(self.beta) ** 2,
                np.abs(self.gamma) ** 2,
                np.abs(self.delta) ** 2,
                np.asarray(self.eps_sq, dtype=float),
            ]
        )

    def vector(self) -> NDArray[np.complex128]:
        """Unnormalized no-jump vector in the 5-state basis (zero e component).

        For a batched state the result has shape (n, 5).
        """
        amps = np.broadcast_arrays(self.alpha, self.beta, self.gamma, self.delta)
        psi = np.zeros((*np.shape(amps[0]), 5), dtype=np.complex128)
        for i, amp in enumerate(amps):
            psi[..., i] = amp
        return psi

    def at(self, index: int) -> AmplitudeState:
        """One time sample of a batched state."""
        return AmplitudeState(
            t=float(np.asarray(self.t)[index]),
            alpha=complex(np.asarray(self.alpha)[index]),
            beta=complex(np.asarray(self.beta)[index]),
            gamma=complex(np.asarray(self.gamma)[index]),
            delta=complex(np.asarray(self.delta)[index]),
            eps_sq=float(np.asarray(self.eps_sq)[index]),
        )


@dataclass(frozen=True)
class DensityMatrix5:
    """System density matrix over (|a>, |b>, |c>, |d>, |e>) at time t.

    Construction only checks the shape: integrators emit these as-is so trace
    drift can be measured. Call ``validate()`` where a physical state is required.
    """

    entries: NDArray[np.complex128]
    t: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", _readonly(self.entries, (5, 5)))

    @classmethod
    def pure(cls, index: int, t: float = 0.0) -> DensityMatrix5:
        """Basis projector |x><x| for x = BASIS_LABELS[index]."""
        m = np.zeros((5, 5), dtype=np.complex128)
        m[index, index] = 1.0
        return cls(m, t)

    def problems(self) -> list[str]:
        return _state_problems(self.entries)

    def validate(self) -> DensityMatrix5:
        problems = self.problems()
        if problems:
            raise StateError(f"Invalid density matrix at t={self.t}: {'; '.join(problems)}")
        return self

    @property
    def trace_drift(self) -> float:
        return abs(complex(np.trace(self.entries)) - 1.0)

    def populations(self) -> NDArray[np.float64]:
        return np.real(np.diag(self.entries)).copy()


@dataclass(frozen=True)
class QubitPairDensity:
    """Two-qubit reduced state in the (|0,0>, |0,1>, |1,0>, |1,1>) basis.

    Validated at construction: Hermitian, unit trace and positive semidefinite
    within the module tolerances.
    """

    entries: NDArray[np.complex128]
    subsystem: Literal["atoms", "cavities"] = "atoms"
    t: float = field(default=0.0, compare=False)

    def __post_init__(self) -> None:
        m = _readonly(self.entries, (4, 4))
        object.__setattr__(self, "entries", m)
        problems = _state_problems(m)
        if problems:
            raise StateError(f"Invalid {self.subsystem} state: {'; '.join(problems)}")
