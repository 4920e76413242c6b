"""Quantum-trajectory Monte Carlo with the delay-function method.

Each trajectory draws r ~ U(0, 1) and follows the deterministic no-jump
evolution until the jump probability 1 - p_no(t) reaches 1 - r, i.e. until
p_no(t_J) = r. The jump channel is chosen with probability proportional to
||J_i psi_no(t_J)||^2, and every channel collapses the system to |e>, where it
stays. One jump at most per trajectory.

Randomness is counter based: trajectory i of an ensemble uses the key
``base_seed ^ i`` for a Philox generator, so any partitioning of the ensemble
over threads reproduces the same draws.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import simpson

from qsim.model.operators import jump_stack
from qsim.model.params import SystemParams
from qsim.model.states import E
from qsim.solvers.analytic import amplitudes

logger = logging.getLogger(__name__)

SEED_LIMIT = 2**64
BRACKET_POINTS = 2049
BISECTION_TOL = 1e-10
BATCH_SIZE = 4096
UNIFORM_STEPS = 2**52
GRID_CHUNK = 64  # grid times per state-sum block


class Channel(StrEnum):
    J1 = "J1"
    J2 = "J2"
    J3 = "J3"
    J4 = "J4"
    J5 = "J5"


CHANNELS = tuple(Channel)


@dataclass(frozen=True)
class TrajectoryRecord:
    seed: int
    jumped: bool
    t_jump: float | None = None
    channel: Channel | None = None

    def __post_init__(self) -> None:
        if self.jumped != (self.t_jump is not None) or self.jumped != (self.channel is not None):
            raise ValueError("jumped, t_jump and channel must be all set or all absent")
        if self.t_jump is not None and not self.t_jump > 0:
            raise ValueError(f"t_jump must be > 0, got {self.t_jump}")


@dataclass(frozen=True)
class EnsembleEstimate:
    t_grid: NDArray[np.float64]
    rho_hat: NDArray[np.complex128]  # (n_t, 5, 5) sample mean
    n_traj: int
    channel_counts: dict[Channel, int]
    unjumped: NDArray[np.int64] = field(repr=False)  # trajectories not yet jumped, per grid time

    @property
    def unjumped_fraction(self) -> NDArray[np.float64]:
        return self.unjumped / self.n_traj


# ── random draws ──────────────────────────────────────────────────


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < SEED_LIMIT:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def open_unit(k: ArrayLike) -> NDArray[np.float64]:
    """Midpoint of cell k of [0, 1) split into UNIFORM_STEPS cells; never 0 or 1."""
    return (np.asarray(k, dtype=np.float64) + 0.5) / UNIFORM_STEPS


def draw_uniforms(seed: int) -> tuple[float, float]:
    """(r, u) for one trajectory: the jump threshold and the channel selector."""
    gen = np.random.Generator(np.random.Philox(key=_check_seed(seed)))
    r, u = open_unit(gen.integers(0, UNIFORM_STEPS, size=2))
    return float(r), float(u)


def trajectory_seeds(base_seed: int, start: int, stop: int) -> NDArray[np.uint64]:
    base = np.uint64(_check_seed(base_seed))
    return np.bitwise_xor(base, np.arange(start, stop, dtype=np.uint64))


# ── jump statistics ───────────────────────────────────────────────


def channel_rates(params: SystemParams, t: ArrayLike) -> NDArray[np.float64]:
    """||J_i psi_no(t)||^2 for each channel; shape (5,) or (5, n) for an array of times.

    Their sum is -dp_no/dt, the waiting-time density of the first jump.
    """
    state = amplitudes(params, t)
    psi = state.vector()
    # J_i psi only has an e component: (J_i)[e, :] . psi
    rows = jump_stack(params)[:, E, :]
    images = psi @ rows.T
    return np.moveaxis(np.abs(images) ** 2, -1, 0)


def channel_probabilities(
    params: SystemParams, t_max: float, n_points: int = 20001
) -> dict[Channel, float]:
    """Probability that the jump happens by t_max through each channel (Simpson quadrature)."""
    t = np.linspace(0.0, t_max, n_points)
    rates = channel_rates(params, t)
    return {ch: float(simpson(rates[i], x=t)) for i, ch in enumerate(CHANNELS)}


def _p_no(params: SystemParams, t: NDArray[np.float64]) -> NDArray[np.float64]:
    return amplitudes(params, t).populations()[:4].sum(axis=0)


def _solve_jump_times(
    params: SystemParams, r: NDArray[np.float64], t_max: float
) -> NDArray[np.float64]:
    """t_J with p_no(t_J) = r, or +inf when p_no(t_max) > r.

    Brackets on a fixed grid of p_no, then bisects to BISECTION_TOL. The grid
    depends only on t_max, so a trajectory's result does not depend on which
    batch it was solved in.
    """
    grid = np.linspace(0.0, t_max, BRACKET_POINTS)
    p_grid = _p_no(params, grid)
    t_jump = np.full(r.shape, np.inf)
    fires = p_grid[-1] <= r
    if not np.any(fires):
        return t_jump
    # p_no is nonincreasing: the first grid index with p_no <= r closes the bracket.
    hi_idx = np.searchsorted(-p_grid, -r[fires], side="left")
    hi_idx = np.clip(hi_idx, 1, BRACKET_POINTS - 1)
    lo, hi = grid[hi_idx - 1], grid[hi_idx]
    target = r[fires]
    n_iter = max(1, math.ceil(math.log2((grid[1] - grid[0]) / BISECTION_TOL)))
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        above = _p_no(params, mid) > target
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    t_jump[fires] = hi
    return t_jump


def _pick_channels(
    params: SystemParams, t_jump: NDArray[np.float64], u: NDArray[np.float64]
) -> NDArray[np.int64]:
    """Channel index per jumped trajectory (-1 where no jump)."""
    picks = np.full(t_jump.shape, -1, dtype=np.int64)
    fired = np.isfinite(t_jump)
    if not np.any(fired):
        return picks
    weights = channel_rates(params, t_jump[fired])  # (5, n)
    total = weights.sum(axis=0)
    if np.any(total <= 0):
        logger.warning("Zero jump rate at %d jump instants", int(np.sum(total <= 0)))
    cumulative = np.cumsum(weights, axis=0) / np.where(total > 0, total, 1.0)
    # first channel whose cumulative weight exceeds u
    idx = (cumulative <= u[fired][None, :]).sum(axis=0)
    picks[fired] = np.minimum(idx, len(CHANNELS) - 1)
    return picks


def _sample_batch(
    params: SystemParams, t_max: float, seeds: NDArray[np.uint64]
) -> tuple[NDArray[np.float64], NDArray[np.int64]]:
    draws = np.array([draw_uniforms(int(s)) for s in seeds]).reshape(-1, 2)
    t_jump = _solve_jump_times(params, draws[:, 0], t_max)
    return t_jump, _pick_channels(params, t_jump, draws[:, 1])


# ── public API ────────────────────────────────────────────────────


def sample_trajectory(params: SystemParams, t_max: float, seed: int) -> TrajectoryRecord:
    """One delay-function trajectory on (0, t_max]."""
    if not t_max > 0:
        raise ValueError(f"t_max must be > 0, got {t_max}")
    seed = _check_seed(seed)
    t_jump, picks = _sample_batch(params, t_max, np.array([seed], dtype=np.uint64))
    if not np.isfinite(t_jump[0]):
        return TrajectoryRecord(seed=seed, jumped=False)
    return TrajectoryRecord(
        seed=seed, jumped=True, t_jump=float(t_jump[0]), channel=CHANNELS[int(picks[0])]
    )


def _batch_tally(
    params: SystemParams,
    t_grid: NDArray[np.float64],
    t_max: float,
    seeds: NDArray[np.uint64],
    psi_no: NDArray[np.complex128],
) -> tuple[NDArray[np.int64], NDArray[np.int64], NDArray[np.complex128]]:
    """(unjumped count per grid time, jump count per channel, summed states) for one batch.

    The state sum adds |psi_k(t)><psi_k(t)| for every trajectory k, where psi_k
    is its normalized no-jump vector before its jump and |e> from then on.
    """
    if t_max > 0:
        t_jump, picks = _sample_batch(params, t_max, seeds)
    else:
        t_jump = np.full(len(seeds), np.inf)
        picks = np.full(len(seeds), -1, dtype=np.int64)
    # a trajectory is in its no-jump branch at t while t < t_jump
    in_branch = t_jump[:, None] > t_grid[None, :]
    ground = _ground_vector()
    rho_sum = np.zeros((t_grid.size, 5, 5), dtype=np.complex128)
    for start in range(0, t_grid.size, GRID_CHUNK):
        window = slice(start, start + GRID_CHUNK)
        psi = np.where(in_branch[:, window, None], psi_no[None, window, :], ground)
        rho_sum[window] = np.einsum("kti,ktj->tij", psi, psi.conj())
    unjumped = in_branch.sum(axis=0)
    counts = np.bincount(picks[picks >= 0], minlength=len(CHANNELS))
    logger.debug("Batch of %d trajectories: %d jumps", len(seeds), int(counts.sum()))
    return unjumped.astype(np.int64), counts.astype(np.int64), rho_sum


def _conditioned_vectors(
    params: SystemParams, t_grid: NDArray[np.float64]
) -> NDArray[np.complex128]:
    """Normalized no-jump vectors, shape (n_t, 5); |e> where the branch has no weight."""
    psi = amplitudes(params, t_grid).vector()
    norm = np.sqrt(np.sum(np.abs(psi) ** 2, axis=-1))
    out = psi / np.where(norm > 0, norm, 1.0)[:, None]
    out[norm <= 0] = _ground_vector()
    return out


def _ground_vector() -> NDArray[np.complex128]:
    v = np.zeros(5, dtype=np.complex128)
    v[E] = 1.0
    return v


def ensemble_average(
    params: SystemParams,
    t_grid: ArrayLike,
    n_traj: int,
    base_seed: int = 0,
    max_workers: int = 4,
    batch_size: int = BATCH_SIZE,
) -> EnsembleEstimate:
    """Sample-mean density matrix over n_traj trajectories on t_grid.

    Each trajectory contributes its own conditioned state at every grid time.
    Batches run on a thread pool; their partial sums are merged in batch
    order, so the estimate is bit-identical for any max_workers.
    """
    grid = np.asarray(t_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("t_grid must be a non-empty 1D array")
    if np.any(grid < 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("t_grid must be nonnegative and strictly increasing")
    if n_traj < 1:
        raise ValueError(f"n_traj must be >= 1, got {n_traj}")
    base_seed = _check_seed(base_seed)
    t_max = float(grid[-1])
    psi_no = _conditioned_vectors(params, grid)

    bounds = [(s, min(s + batch_size, n_traj)) for s in range(0, n_traj, batch_size)]
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        tallies = list(
            executor.map(
                lambda b: _batch_tally(
                    params, grid, t_max, trajectory_seeds(base_seed, *b), psi_no
                ),
                bounds,
            )
        )

    unjumped = np.zeros(grid.size, dtype=np.int64)
    counts = np.zeros(len(CHANNELS), dtype=np.int64)
    rho_sum = np.zeros((grid.size, 5, 5), dtype=np.complex128)
    for batch_unjumped, batch_counts, batch_rho in tallies:
        unjumped += batch_unjumped
        counts += batch_counts
        rho_sum += batch_rho

    channel_counts = {ch: int(counts[i]) for i, ch in enumerate(CHANNELS)}
    logger.info(
        "Ensemble: %d trajectories in %d batches, %d jumped by t=%g",
        n_traj,
        len(bounds),
        n_traj - int(unjumped[-1]),
        t_max,
    )
    return EnsembleEstimate(
        t_grid=grid,
        rho_hat=rho_sum / n_traj,
        n_traj=n_traj,
        channel_counts=channel_counts,
        unjumped=unjumped,
    )
