"""Run orchestration: one validated RunConfig in, CSV files out.

Mode dispatch:
- analytic     closed forms on the sample grid
- schrodinger  RK4 no-jump amplitudes
- master       RK4 Lindblad equation, concurrences via the Wootters path
- trajectories Monte Carlo ensemble, plus per-channel jump counts
"""

from __future__ import annotations

import logging
from pathlib import Path

from qsim.config import RunConfig
from qsim.model.states import AmplitudeState
from qsim.series import (
    TimeSeries,
    emit_channel_counts,
    emit_csv,
    series_from_amplitudes,
    series_from_densities,
)
from qsim.solvers.analytic import amplitudes
from qsim.solvers.dynamics import integrate_master, integrate_schrodinger
from qsim.solvers.trajectories import EnsembleEstimate, ensemble_average

logger = logging.getLogger(__name__)


def simulate(cfg: RunConfig) -> tuple[TimeSeries, EnsembleEstimate | None]:
    """Compute the series for cfg.mode. The ensemble is returned in trajectories mode."""
    integrator = cfg.integrator()
    grid = integrator.sample_times()
    logger.info("Mode %s: %d samples on [0, %g]", cfg.mode, len(grid), cfg.t_max)

    if cfg.mode == "analytic":
        return series_from_amplitudes(amplitudes(cfg.params, grid)), None
    if cfg.mode == "schrodinger":
        states = integrate_schrodinger(cfg.params, integrator)
        return series_from_amplitudes(AmplitudeState.stack(states)), None
    if cfg.mode == "master":
        rhos = integrate_master(cfg.params, integrator)
        return series_from_densities([r.t for r in rhos], rhos), None

    assert cfg.n_traj is not None  # RunConfig guarantees it for trajectories
    estimate = ensemble_average(
        cfg.params, grid, cfg.n_traj, base_seed=cfg.seed, max_workers=cfg.workers
    )
    return series_from_densities(grid, estimate.rho_hat), estimate


def run_config(cfg: RunConfig) -> list[Path]:
    """Simulate and write <output>/<mode>.csv (and channels.csv for trajectories)."""
    out_dir = Path(cfg.output)
    series, estimate = simulate(cfg)
    written = [emit_csv(series, out_dir / f"{cfg.mode}.csv")]
    if estimate is not None:
        counts = {str(ch): n for ch, n in estimate.channel_counts.items()}
        written.append(emit_channel_counts(counts, estimate.n_traj, out_dir / "channels.csv"))
    return written
