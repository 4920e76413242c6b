"""TimeSeries — per-sample occupation probabilities and concurrences, and their CSV form.

CSV layout: header ``t,p_a,p_b,p_c,p_d,p_e,c_at,c_cav``, one row per sample,
every value printed with 12 significant digits (``format(x, ".12g")``, which
is locale independent), LF line endings. Identical inputs give identical bytes.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from qsim.entanglement import (
    concurrence,
    concurrence_atoms_closed,
    concurrence_cavities_closed,
    partial_trace_atoms,
    partial_trace_cavities,
)
from qsim.model.states import AmplitudeState, DensityMatrix5

logger = logging.getLogger(__name__)

COLUMNS = ("t", "p_a", "p_b", "p_c", "p_d", "p_e", "c_at", "c_cav")
SUM_TOL = 1e-8


@dataclass(frozen=True)
class TimeSeries:
    t: NDArray[np.float64]
    p_a: NDArray[np.float64]
    p_b: NDArray[np.float64]
    p_c: NDArray[np.float64]
    p_d: NDArray[np.float64]
    p_e: NDArray[np.float64]
    c_at: NDArray[np.float64]
    c_cav: NDArray[np.float64]

    def __post_init__(self) -> None:
        for name in COLUMNS:
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        n = len(self.t)
        if any(len(getattr(self, name)) != n for name in COLUMNS):
            raise ValueError("TimeSeries columns must have equal length")
        row_sum = self.p_a + self.p_b + self.p_c + self.p_d + self.p_e
        if n and np.max(np.abs(row_sum - 1.0)) > SUM_TOL:
            off = float(np.max(np.abs(row_sum - 1.0)))
            raise ValueError(f"populations do not sum to 1 (off by {off:.3e})")
        for name in ("c_at", "c_cav"):
            col = getattr(self, name)
            if np.any(col < 0) or np.any(col > 1):
                raise ValueError(f"{name} outside [0, 1]")

    def __len__(self) -> int:
        return len(self.t)

    def columns(self) -> NDArray[np.float64]:
        """(n, 8) array in COLUMNS order."""
        return np.column_stack([getattr(self, name) for name in COLUMNS])


# ── builders ──────────────────────────────────────────────────────


def series_from_amplitudes(state: AmplitudeState) -> TimeSeries:
    """Series from a batched no-jump state, concurrences from the closed forms."""
    p = state.populations()
    return TimeSeries(
        t=np.atleast_1d(state.t),
        p_a=np.atleast_1d(p[0]),
        p_b=np.atleast_1d(p[1]),
        p_c=np.atleast_1d(p[2]),
        p_d=np.atleast_1d(p[3]),
        p_e=np.atleast_1d(p[4]),
        c_at=np.atleast_1d(concurrence_atoms_closed(state.alpha, state.gamma)),
        c_cav=np.atleast_1d(concurrence_cavities_closed(state.beta, state.delta)),
    )


def series_from_densities(
    times: Sequence[float] | NDArray[np.float64], rhos: Sequence[DensityMatrix5] | NDArray
) -> TimeSeries:
    """Series from density matrices, concurrences from the Wootters eigensolver path."""
    mats = [r.entries if isinstance(r, DensityMatrix5) else np.asarray(r) for r in rhos]
    pops = np.array([np.real(np.diag(m)) for m in mats]).reshape(-1, 5)
    c_at, c_cav = [], []
    for t, m in zip(times, mats, strict=True):
        rho = DensityMatrix5(m, float(t))
        c_at.append(concurrence(partial_trace_cavities(rho)))
        c_cav.append(concurrence(partial_trace_atoms(rho)))
    return TimeSeries(
        t=np.asarray(times, dtype=np.float64),
        p_a=pops[:, 0],
        p_b=pops[:, 1],
        p_c=pops[:, 2],
        p_d=pops[:, 3],
        p_e=pops[:, 4],
        c_at=np.array(c_at),
        c_cav=np.array(c_cav),
    )


# ── CSV ───────────────────────────────────────────────────────────


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def emit_csv(series: TimeSeries, path: str | Path) -> Path:
    """Write the series to path. OSError carries the path."""
    path = Path(path)
    lines = [",".join(COLUMNS)]
    lines.extend(",".join(_fmt(v) for v in row) for row in series.columns())
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write("\n".join(lines) + "\n")
    except OSError as e:
        raise OSError(f"Failed to write {path}: {e}") from e
    logger.info("Wrote %d rows to %s", len(series), path)
    return path


def read_csv(path: str | Path) -> TimeSeries:
    """Parse a file written by emit_csv."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise OSError(f"Failed to read {path}: {e}") from e
    rows = text.splitlines()
    if not rows or tuple(rows[0].split(",")) != COLUMNS:
        raise ValueError(f"{path}: unexpected header")
    data = np.array([[float(v) for v in row.split(",")] for row in rows[1:]]).reshape(-1, 8)
    return TimeSeries(*(data[:, i] for i in range(len(COLUMNS))))


def emit_channel_counts(counts: Mapping[str, int], n_traj: int, path: str | Path) -> Path:
    """channel,count,fraction: one row per jump channel, plus the no-jump remainder."""
    path = Path(path)
    no_jump = n_traj - sum(counts.values())
    lines = ["channel,count,fraction"]
    for name, count in [*counts.items(), ("none", no_jump)]:
        lines.append(f"{name},{count},{_fmt(count / n_traj)}")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write("\n".join(lines) + "\n")
    except OSError as e:
        raise OSError(f"Failed to write {path}: {e}") from e
    logger.info("Wrote channel counts to %s", path)
    return path
