"""Tests for the delay-function Monte Carlo.

The 10^5-trajectory ensemble for fig2 is built once per module.
"""

from __future__ import annotations

import numpy as np
import pytest
from scipy import stats

from qsim.model.params import SystemParams
from qsim.model.states import DensityMatrix5, E
from qsim.presets import loss_params
from qsim.solvers.analytic import amplitudes, conditioned_density, p_no
from qsim.solvers.dynamics import IntegratorConfig, integrate_master
from qsim.solvers.trajectories import (
    CHANNELS,
    SEED_LIMIT,
    UNIFORM_STEPS,
    Channel,
    TrajectoryRecord,
    _sample_batch,
    channel_probabilities,
    channel_rates,
    draw_uniforms,
    ensemble_average,
    open_unit,
    sample_trajectory,
    trajectory_seeds,
)

N_LARGE = 100_000
CHECKPOINTS = np.linspace(0.0, 10.0, 11)


@pytest.fixture(scope="module")
def fig2_ensemble():
    return ensemble_average(loss_params(0.9, 0.2), CHECKPOINTS, N_LARGE, base_seed=12345)


@pytest.fixture
def atom_decay_params() -> SystemParams:
    """Decoupled atom A with Gamma_a = 0.5; every other channel closed."""
    return SystemParams(
        g_a=0.0,
        g_b=0.0,
        kappa_a=0.0,
        kappa_b=0.0,
        kappa_prime_a=1.0,
        kappa_prime_b=1.0,
        gamma_a=0.5,
        gamma_b=0.0,
        delta_a=0.0,
        delta_b=0.0,
    )


def _seed_with(predicate, limit: int = 10_000) -> int:
    for seed in range(limit):
        if predicate(*draw_uniforms(seed)):
            return seed
    raise AssertionError("no seed found")


# ── random draws ───────────────────────────────────────────────────


class TestDraws:
    def test_deterministic(self):
        assert draw_uniforms(42) == draw_uniforms(42)
        assert draw_uniforms(42) != draw_uniforms(43)

    def test_unit_interval(self):
        for seed in range(200):
            r, u = draw_uniforms(seed)
            assert 0 < r < 1 and 0 < u < 1

    def test_extreme_cells_stay_open(self):
        lowest, highest = open_unit([0, UNIFORM_STEPS - 1])
        assert lowest == 2.0**-53
        assert highest == 1.0 - 2.0**-53
        assert 0.0 < lowest and highest < 1.0

    @pytest.mark.parametrize("seed", [-1, SEED_LIMIT])
    def test_seed_range(self, seed):
        with pytest.raises(ValueError, match="64-bit"):
            draw_uniforms(seed)

    def test_largest_seed(self):
        draw_uniforms(SEED_LIMIT - 1)

    def test_trajectory_seeds_xor(self):
        seeds = trajectory_seeds(0b1010, 0, 4)
        assert seeds.tolist() == [0b1010, 0b1011, 0b1000, 0b1001]


class TestTrajectoryRecord:
    def test_consistent_fields(self):
        with pytest.raises(ValueError):
            TrajectoryRecord(seed=1, jumped=True)
        with pytest.raises(ValueError):
            TrajectoryRecord(seed=1, jumped=False, t_jump=1.0, channel=Channel.J1)

    def test_jump_time_positive(self):
        with pytest.raises(ValueError, match="t_jump"):
            TrajectoryRecord(seed=1, jumped=True, t_jump=0.0, channel=Channel.J4)


# ── jump statistics ────────────────────────────────────────────────


class TestChannelRates:
    def test_sum_is_waiting_time_density(self, fig2_params):
        t = np.linspace(0.5, 9.5, 19)
        h = 1e-5
        ahead, behind = amplitudes(fig2_params, t + h), amplitudes(fig2_params, t - h)
        dp = (p_no(ahead) - p_no(behind)) / (2 * h)
        rates = channel_rates(fig2_params, t)
        assert rates.shape == (5, 19)
        np.testing.assert_allclose(rates.sum(axis=0), -dp, atol=1e-8)

    def test_scalar_time(self, fig2_params):
        rates = channel_rates(fig2_params, 0.0)
        # at t = 0 only the atom in node A can decay
        np.testing.assert_allclose(rates, [0, 0, 0, 0.2, 0], atol=1e-15)

    def test_probabilities_sum_to_jump_probability(self, fig2_params):
        probs = channel_probabilities(fig2_params, 10.0)
        assert set(probs) == set(CHANNELS)
        p_jump = 1 - p_no(amplitudes(fig2_params, 10.0))
        assert sum(probs.values()) == pytest.approx(p_jump, abs=1e-8)


# ── single trajectories ────────────────────────────────────────────


class TestSampleTrajectory:
    def test_no_jump_for_large_threshold(self, fig2_params):
        seed = _seed_with(lambda r, _u: 0.99 < r < 0.999)
        record = sample_trajectory(fig2_params, 1e-3, seed)
        assert not record.jumped
        assert record.t_jump is None and record.channel is None

    def test_jump_time_solves_threshold(self, fig2_params):
        floor = 2 * p_no(amplitudes(fig2_params, 10.0))
        seed = _seed_with(lambda r, _u: floor < r < 0.9)
        record = sample_trajectory(fig2_params, 10.0, seed)
        assert record.jumped
        r, _ = draw_uniforms(seed)
        assert p_no(amplitudes(fig2_params, record.t_jump)) == pytest.approx(r, abs=1e-9)

    def test_reproducible(self, fig2_params):
        assert sample_trajectory(fig2_params, 10.0, 7) == sample_trajectory(fig2_params, 10.0, 7)

    def test_rejects_bad_horizon(self, fig2_params):
        with pytest.raises(ValueError, match="t_max"):
            sample_trajectory(fig2_params, 0.0, 1)

    def test_single_decay_channel_is_exponential(self, atom_decay_params):
        seeds = trajectory_seeds(99, 0, 10_000)
        t_jump, picks = _sample_batch(atom_decay_params, 60.0, seeds)
        assert np.all(np.isfinite(t_jump))
        assert np.all(picks == CHANNELS.index(Channel.J4))
        ks = stats.kstest(t_jump, stats.expon(scale=1 / 0.5).cdf)
        assert ks.statistic < 0.02


# ── ensembles ──────────────────────────────────────────────────────


class TestEnsemble:
    def test_single_unjumped_trajectory(self, fig2_params):
        grid = np.linspace(0.0, 0.5, 6)
        threshold = p_no(amplitudes(fig2_params, 0.5))
        seed = _seed_with(lambda r, _u: r < 0.9 * threshold)
        est = ensemble_average(fig2_params, grid, n_traj=1, base_seed=seed)
        assert est.unjumped.tolist() == [1] * 6
        for i, t in enumerate(grid):
            expected = conditioned_density(amplitudes(fig2_params, t)).entries
            np.testing.assert_allclose(est.rho_hat[i], expected, atol=1e-14)

    def test_independent_of_worker_count(self, fig2_params):
        grid = np.linspace(0.0, 10.0, 21)
        kwargs = {"base_seed": 3, "batch_size": 700}
        one = ensemble_average(fig2_params, grid, 5_000, max_workers=1, **kwargs)
        four = ensemble_average(fig2_params, grid, 5_000, max_workers=4, **kwargs)
        np.testing.assert_array_equal(one.rho_hat, four.rho_hat)
        assert one.channel_counts == four.channel_counts

    @pytest.mark.parametrize(
        "kwargs, match",
        [
            ({"t_grid": [0.0, 1.0], "n_traj": 0}, "n_traj"),
            ({"t_grid": [1.0, 0.5], "n_traj": 10}, "increasing"),
            ({"t_grid": [], "n_traj": 10}, "non-empty"),
            ({"t_grid": [0.0, 1.0], "n_traj": 10, "base_seed": -5}, "64-bit"),
        ],
    )
    def test_invalid_arguments(self, fig2_params, kwargs, match):
        with pytest.raises(ValueError, match=match):
            ensemble_average(fig2_params, **kwargs)

    def test_zero_horizon_grid(self, fig2_params):
        est = ensemble_average(fig2_params, [0.0], 10)
        assert est.unjumped.tolist() == [10]
        assert sum(est.channel_counts.values()) == 0

    def test_matches_master_equation(self, fig2_ensemble):
        cfg = IntegratorConfig(dt=1e-3, t_max=10.0, sample_stride=1_000)
        master = integrate_master(loss_params(0.9, 0.2), cfg)
        assert len(master) == len(CHECKPOINTS)
        for i, rho in enumerate(master):
            assert np.max(np.abs(fig2_ensemble.rho_hat[i] - rho.entries)) <= 5e-3

    def test_unjumped_fraction_tracks_p_no(self, fig2_ensemble):
        p = p_no(amplitudes(loss_params(0.9, 0.2), CHECKPOINTS))
        sigma = np.sqrt(p * (1 - p) / N_LARGE)
        assert fig2_ensemble.unjumped_fraction[0] == 1.0
        assert np.all(np.abs(fig2_ensemble.unjumped_fraction - p) <= 3 * sigma + 1e-12)

    def test_channel_fractions_match_quadrature(self, fig2_ensemble):
        probs = channel_probabilities(loss_params(0.9, 0.2), 10.0)
        for ch, count in fig2_ensemble.channel_counts.items():
            p = probs[ch]
            sigma = np.sqrt(p * (1 - p) / N_LARGE)
            assert abs(count / N_LARGE - p) <= 3 * sigma + 1e-12, ch

    def test_mixture_of_branch_states(self, fig2_ensemble):
        fraction = fig2_ensemble.unjumped_fraction
        assert 0.0 < fraction[-1] < fraction[0] == 1.0
        ground = DensityMatrix5.pure(E).entries
        for i, t in enumerate(CHECKPOINTS):
            branch = conditioned_density(amplitudes(loss_params(0.9, 0.2), t)).entries
            mixture = fraction[i] * branch + (1.0 - fraction[i]) * ground
            assert np.max(np.abs(fig2_ensemble.rho_hat[i] - mixture)) <= 1e-12, t

    def test_critical_coupling(self, critical_params):
        est = ensemble_average(critical_params, np.linspace(0.0, 5.0, 6), 500, base_seed=8)
        assert est.unjumped[0] == 500
        assert sum(est.channel_counts.values()) == 500 - est.unjumped[-1] > 0
        for i, t in enumerate(est.t_grid):
            DensityMatrix5(est.rho_hat[i], float(t)).validate()

    def test_rho_hat_is_physical(self, fig2_ensemble):
        for i, t in enumerate(CHECKPOINTS):
            DensityMatrix5(fig2_ensemble.rho_hat[i], float(t)).validate()
