"""Direct numerical integration — the independent oracle for the closed forms.

Two fixed-step RK4 integrators:
- ``integrate_schrodinger``: d psi/dt = -i H_eff psi (the no-jump amplitudes)
- ``integrate_master``: the Lindblad master equation for the full 5x5 rho

Both equations are linear and time independent, so one RK4 step is a fixed
matrix. It is built once with ``linear_step_propagator`` and raised to the
``sample_stride``-th power to hop from sample to sample.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from qsim.model.operators import build_effective_hamiltonian, build_hamiltonian, jump_stack
from qsim.model.params import SystemParams
from qsim.model.states import A, AmplitudeState, DensityMatrix5
from qsim.numerics.linalg import adjoint
from qsim.numerics.rk4 import Derivative, linear_step_propagator

logger = logging.getLogger(__name__)

# dt * max|H_eff entry| above this is rejected
STABILITY_LIMIT = 0.1
TRACE_DRIFT_WARN = 1e-9


class StepSizeError(ValueError):
    """Step size too large for the stability guard."""


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 1e-3
    t_max: float = 10.0
    sample_stride: int = 1

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not self.t_max >= 0:
            raise ValueError(f"t_max must be >= 0, got {self.t_max}")
        if self.t_max > 0 and self.dt > self.t_max:
            raise ValueError(f"dt ({self.dt}) must not exceed t_max ({self.t_max})")
        if self.sample_stride < 1:
            raise ValueError(f"sample_stride must be a positive integer, got {self.sample_stride}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_max / self.dt))

    def sample_steps(self) -> NDArray[np.int64]:
        """Step indices at which a sample is emitted (always includes step 0)."""
        return np.arange(0, self.n_steps + 1, self.sample_stride)

    def sample_times(self) -> NDArray[np.float64]:
        return self.sample_steps() * self.dt


def check_step_size(params: SystemParams, dt: float) -> None:
    scale = float(np.max(np.abs(build_effective_hamiltonian(params).entries)))
    if dt * scale > STABILITY_LIMIT:
        raise StepSizeError(
            f"dt={dt} too large: dt * max|H_eff| = {dt * scale:.3g} exceeds {STABILITY_LIMIT}"
        )


def _propagate(
    step: NDArray[np.complex128], y0: NDArray[np.complex128], cfg: IntegratorConfig
) -> list[NDArray[np.complex128]]:
    hop = np.linalg.matrix_power(step, cfg.sample_stride)
    samples = [y0]
    y = y0
    for _ in range(len(cfg.sample_steps()) - 1):
        y = hop @ y
        samples.append(y)
    return samples


# ── no-jump Schrodinger equation ──────────────────────────────────


def integrate_schrodinger(
    params: SystemParams, cfg: IntegratorConfig
) -> list[AmplitudeState]:
    """RK4 trajectory of the four coupled amplitude equations, starting in |a>."""
    check_step_size(params, cfg.dt)
    h_eff = build_effective_hamiltonian(params).entries

    def rhs(_t: float, psi: NDArray[np.complex128]) -> NDArray[np.complex128]:
        return -1j * (psi @ h_eff.T)

    step = linear_step_propagator(rhs, (5,), cfg.dt)
    psi0 = np.zeros(5, dtype=np.complex128)
    psi0[A] = 1.0
    vectors = _propagate(step, psi0, cfg)
    states = [
        AmplitudeState.from_amplitudes(float(t), *(complex(x) for x in psi[:4]))
        for t, psi in zip(cfg.sample_times(), vectors, strict=True)
    ]
    logger.info(
        "Schrodinger: %d steps (dt=%g), %d samples, final p_no=%.6f",
        cfg.n_steps,
        cfg.dt,
        len(states),
        1.0 - states[-1].eps_sq,
    )
    return states


# ── Lindblad master equation ──────────────────────────────────────


def lindblad_rhs(params: SystemParams) -> Derivative:
    """d rho/dt = -i[H, rho] + sum_i (J rho J^dag - {J^dag J, rho}/2).

    The returned function accepts a single 5x5 matrix or a stack of them.
    """
    h = build_hamiltonian(params).entries
    js = jump_stack(params)
    js_dag = adjoint(js)
    norm = np.einsum("kij,kjl->il", js_dag, js)

    def rhs(_t: float, rho: NDArray[np.complex128]) -> NDArray[np.complex128]:
        out = -1j * (h @ rho - rho @ h) - 0.5 * (norm @ rho + rho @ norm)
        for j, j_dag in zip(js, js_dag, strict=True):
            out = out + j @ rho @ j_dag
        return out

    return rhs


def integrate_master(
    params: SystemParams,
    cfg: IntegratorConfig,
    rho0: DensityMatrix5 | None = None,
) -> list[DensityMatrix5]:
    """RK4 trajectory of the master equation. No trace renormalization is applied."""
    check_step_size(params, cfg.dt)
    if rho0 is None:
        rho0 = DensityMatrix5.pure(A)
    rho0.validate()
    step = linear_step_propagator(lindblad_rhs(params), (5, 5), cfg.dt)
    vecs = _propagate(step, rho0.entries.ravel().copy(), cfg)
    out = [
        DensityMatrix5(v.reshape(5, 5), float(t))
        for t, v in zip(cfg.sample_times(), vecs, strict=True)
    ]
    drift = max(rho.trace_drift for rho in out)
    if drift > TRACE_DRIFT_WARN:
        logger.warning("Master equation trace drift %.3e exceeds %.0e", drift, TRACE_DRIFT_WARN)
    logger.info(
        "Master: %d steps (dt=%g), %d samples, max trace drift=%.3e",
        cfg.n_steps,
        cfg.dt,
        len(out),
        drift,
    )
    return out

