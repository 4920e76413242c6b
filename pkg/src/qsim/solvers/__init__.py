"""The three dynamics paths: closed forms, RK4 integration, quantum trajectories."""

from qsim.solvers.analytic import (
    ParameterMismatchError,
    alpha_beta,
    amplitudes,
    density_matrix,
    gamma_delta_equal,
    gamma_delta_general,
    omega,
    p_no,
)
from qsim.solvers.dynamics import (
    IntegratorConfig,
    StepSizeError,
    integrate_master,
    integrate_schrodinger,
)
from qsim.solvers.trajectories import (
    EnsembleEstimate,
    TrajectoryRecord,
    ensemble_average,
    sample_trajectory,
)

__all__ = [
    "EnsembleEstimate",
    "IntegratorConfig",
    "ParameterMismatchError",
    "StepSizeError",
    "TrajectoryRecord",
    "alpha_beta",
    "amplitudes",
    "density_matrix",
    "ensemble_average",
    "gamma_delta_equal",
    "gamma_delta_general",
    "integrate_master",
    "integrate_schrodinger",
    "omega",
    "p_no",
    "sample_trajectory",
]
