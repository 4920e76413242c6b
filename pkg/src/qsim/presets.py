"""Figure presets and the loss-sensitivity sweep.

All presets use equal parameters for both nodes, rates in units of K = 1,
phi = 0, and the analytic path on a uniform 10,001-point grid over Kt in [0, 10].

    fig2  occupation probabilities     g=5, kappa=0.9, Delta=0.1, Gamma=0.2
    fig3  atom-pair concurrence        g=5, Delta=0.1, (kappa, Gamma) in
                                       {(0.9, 0.2), (0.9, 0), (1, 0)}
    fig4  atom vs cavity concurrence   fig2 parameters
"""

from __future__ import annotations

import logging
from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from qsim.model.params import SystemParams
from qsim.series import TimeSeries, emit_csv, series_from_amplitudes
from qsim.solvers.analytic import amplitudes

logger = logging.getLogger(__name__)

PRESET_NAMES = ("fig2", "fig3", "fig4")
GRID_POINTS = 10_001
T_END = 10.0
G_OVER_K = 5.0
DELTA_OVER_K = 0.1


def preset_grid() -> NDArray[np.float64]:
    return np.linspace(0.0, T_END, GRID_POINTS)


def loss_params(kappa: float, gamma: float, phi: float = 0.0) -> SystemParams:
    """Equal nodes with K = 1: kappa' = 1 - kappa absorbs the rest of the cavity loss."""
    return SystemParams.symmetric(
        g=G_OVER_K,
        kappa=kappa,
        kappa_prime=1.0 - kappa,
        gamma=gamma,
        delta=DELTA_OVER_K,
        phi=phi,
    )


FIG3_LOSSES = ((0.9, 0.2), (0.9, 0.0), (1.0, 0.0))


def _fmt_ratio(x: float) -> str:
    return format(x, "g")


def preset_cases(name: str) -> dict[str, SystemParams]:
    """Output file stem -> parameters, for one preset."""
    if name == "fig2":
        return {"fig2": loss_params(0.9, 0.2)}
    if name == "fig3":
        return {
            f"fig3_kappa{_fmt_ratio(k)}_gamma{_fmt_ratio(g)}": loss_params(k, g)
            for k, g in FIG3_LOSSES
        }
    if name == "fig4":
        return {"fig4": loss_params(0.9, 0.2)}
    raise ValueError(f"Unknown preset '{name}' (choose from {', '.join(PRESET_NAMES)})")


def analytic_series(params: SystemParams, t_grid: NDArray[np.float64] | None = None) -> TimeSeries:
    grid = preset_grid() if t_grid is None else t_grid
    return series_from_amplitudes(amplitudes(params, grid))


def run_preset(name: str, output_dir: str | Path) -> dict[Path, TimeSeries]:
    """Write every CSV of a preset into output_dir. Returns path -> series."""
    out_dir = Path(output_dir)
    written: dict[Path, TimeSeries] = {}
    for stem, params in preset_cases(name).items():
        series = analytic_series(params)
        written[emit_csv(series, out_dir / f"{stem}.csv")] = series
    logger.info("Preset %s: wrote %d file(s) to %s", name, len(written), out_dir)
    return written


# ── peaks and sweeps ──────────────────────────────────────────────


def series_peak(series: TimeSeries) -> tuple[float, float]:
    """(t_peak, max C_at) over t > 0 of an existing series."""
    mask = series.t > 0
    idx = int(np.argmax(series.c_at[mask]))
    return float(series.t[mask][idx]), float(series.c_at[mask][idx])


def peak_concurrence(
    params: SystemParams, t_grid: NDArray[np.float64] | None = None
) -> tuple[float, float]:
    """Location and value of the atom-pair concurrence maximum on t_grid."""
    return series_peak(analytic_series(params, t_grid))


@dataclass(frozen=True)
class SweepRow:
    kappa_over_k: float
    gamma_over_k: float
    t_peak: float
    c_at_peak: float


def loss_sweep(
    kappa_ratios: Iterable[float],
    gamma_ratios: Iterable[float],
    t_grid: NDArray[np.float64] | None = None,
) -> list[SweepRow]:
    """Peak atom-pair concurrence over a grid of (kappa/K, Gamma/K)."""
    gammas = list(gamma_ratios)
    rows = []
    for kappa in kappa_ratios:
        for gamma in gammas:
            t_peak, c_peak = peak_concurrence(loss_params(kappa, gamma), t_grid)
            rows.append(SweepRow(kappa, gamma, t_peak, c_peak))
    logger.info("Loss sweep: %d parameter points", len(rows))
    return rows


def emit_sweep_csv(rows: list[SweepRow], path: str | Path) -> Path:
    path = Path(path)
    lines = ["kappa_over_k,gamma_over_k,t_peak,c_at_peak"]
    lines.extend(
        ",".join(
            format(v, ".12g") for v in (r.kappa_over_k, r.gamma_over_k, r.t_peak, r.c_at_peak)
        )
        for r in rows
    )
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write("\n".join(lines) + "\n")
    except OSError as e:
        raise OSError(f"Failed to write {path}: {e}") from e
    return path
