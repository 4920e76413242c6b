"""Physical model — parameters, basis states and operator matrices."""

from qsim.model.operators import (
    OperatorLabel,
    OperatorMatrix,
    build_effective_hamiltonian,
    build_hamiltonian,
    build_jump_operators,
)
from qsim.model.params import Node, SystemParams, derived_rates
from qsim.model.states import AmplitudeState, DensityMatrix5, QubitPairDensity, StateError

__all__ = [
    "AmplitudeState",
    "DensityMatrix5",
    "Node",
    "OperatorLabel",
    "OperatorMatrix",
    "QubitPairDensity",
    "StateError",
    "SystemParams",
    "build_effective_hamiltonian",
    "build_hamiltonian",
    "build_jump_operators",
    "derived_rates",
]
