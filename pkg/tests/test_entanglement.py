"""Tests for partial traces and concurrence."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import unitary_group

from qsim.entanglement import (
    Q00,
    Q01,
    Q10,
    Q11,
    concurrence,
    concurrence_atoms_closed,
    concurrence_cavities_closed,
    partial_trace_atoms,
    partial_trace_cavities,
)
from qsim.model.states import A, AmplitudeState, B, C, D, DensityMatrix5, E, QubitPairDensity
from qsim.solvers.analytic import amplitudes, density_matrix


def projector(index: int, dim: int = 4) -> np.ndarray:
    m = np.zeros((dim, dim), dtype=complex)
    m[index, index] = 1
    return m


def random_amplitude_state(rng: np.random.Generator) -> AmplitudeState:
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    v *= rng.uniform(0.2, 1.0) / np.linalg.norm(v)
    return AmplitudeState.from_amplitudes(0.0, *v)


# ── partial traces ─────────────────────────────────────────────────


class TestPartialTraces:
    def test_excited_atom(self):
        rho_at = partial_trace_cavities(DensityMatrix5.pure(A))
        np.testing.assert_array_equal(rho_at.entries, projector(Q10))
        assert rho_at.subsystem == "atoms"

    def test_ground_state(self):
        rho_at = partial_trace_cavities(DensityMatrix5.pure(E))
        np.testing.assert_array_equal(rho_at.entries, projector(Q00))

    def test_cavity_photon(self):
        rho_cav = partial_trace_atoms(DensityMatrix5.pure(B))
        np.testing.assert_array_equal(rho_cav.entries, projector(Q10))
        assert rho_cav.subsystem == "cavities"

    def test_atom_excitation_leaves_cavities_empty(self):
        rho_cav = partial_trace_atoms(DensityMatrix5.pure(A))
        np.testing.assert_array_equal(rho_cav.entries, projector(Q00))

    def test_target_node_maps_to_second_qubit(self):
        at_c = partial_trace_cavities(DensityMatrix5.pure(C)).entries
        cav_d = partial_trace_atoms(DensityMatrix5.pure(D)).entries
        np.testing.assert_array_equal(at_c, projector(Q01))
        np.testing.assert_array_equal(cav_d, projector(Q01))

    def test_closed_form_state_structure(self, unequal_params):
        state = amplitudes(unequal_params, 1.3)
        rho_at = partial_trace_cavities(density_matrix(state)).entries
        a, g = state.alpha, state.gamma
        expected = np.zeros((4, 4), dtype=complex)
        expected[Q10, Q10] = abs(a) ** 2
        expected[Q01, Q01] = abs(g) ** 2
        expected[Q10, Q01] = a * np.conj(g)
        expected[Q01, Q10] = g * np.conj(a)
        expected[Q00, Q00] = abs(state.beta) ** 2 + abs(state.delta) ** 2 + state.eps_sq
        np.testing.assert_allclose(rho_at, expected, atol=1e-15)
        assert np.all(rho_at[Q11, :] == 0)

    def test_coherence_with_ground_survives(self):
        # (|a> + |e>)/sqrt(2): a and e share the empty cavities
        psi = np.zeros(5, dtype=complex)
        psi[A] = psi[E] = 1 / np.sqrt(2)
        rho = DensityMatrix5(np.outer(psi, psi.conj()))
        rho_at = partial_trace_cavities(rho).entries
        assert rho_at[Q10, Q00] == pytest.approx(0.5)
        # a and e differ in atom A, so tracing out the atoms drops the coherence
        rho_cav = partial_trace_atoms(rho).entries
        assert rho_cav[Q00, Q00] == pytest.approx(1.0)

    def test_fig2_cavity_coherence(self, fig2_params):
        state = amplitudes(fig2_params, 1.88)
        rho_cav = partial_trace_atoms(density_matrix(state)).entries
        expected = abs(state.beta) * abs(state.delta)
        assert abs(rho_cav[Q10, Q01]) == pytest.approx(expected, abs=1e-15)

    def test_time_carried_over(self):
        assert partial_trace_atoms(DensityMatrix5.pure(A, t=2.5)).t == 2.5


# ── concurrence ────────────────────────────────────────────────────


class TestConcurrence:
    def test_separable(self):
        assert concurrence(QubitPairDensity(projector(Q00))) == 0.0

    def test_single_excitation_bell_state(self):
        phi = np.zeros(4, dtype=complex)
        phi[Q10] = phi[Q01] = 1 / np.sqrt(2)
        c = concurrence(QubitPairDensity(np.outer(phi, phi.conj())))
        assert c == pytest.approx(1.0, abs=1e-12)

    def test_maximally_mixed(self):
        assert concurrence(QubitPairDensity(np.eye(4) / 4)) == 0.0

    def test_werner_state(self):
        # p |Psi-><Psi-| + (1 - p) I/4 has C = max(0, (3p - 1)/2)
        psi = np.zeros(4, dtype=complex)
        psi[Q01], psi[Q10] = 1 / np.sqrt(2), -1 / np.sqrt(2)
        for p in (0.2, 0.5, 0.8, 1.0):
            rho = p * np.outer(psi, psi.conj()) + (1 - p) * np.eye(4) / 4
            expected = max(0.0, (3 * p - 1) / 2)
            assert concurrence(QubitPairDensity(rho)) == pytest.approx(expected, abs=1e-10)

    def test_wootters_matches_closed_forms(self):
        rng = np.random.default_rng(20240601)
        for _ in range(200):
            state = random_amplitude_state(rng)
            rho = density_matrix(state)
            c_at = concurrence(partial_trace_cavities(rho))
            c_cav = concurrence(partial_trace_atoms(rho))
            assert abs(c_at - concurrence_atoms_closed(state.alpha, state.gamma)) <= 1e-10
            assert abs(c_cav - concurrence_cavities_closed(state.beta, state.delta)) <= 1e-10

    def test_cavity_peak_matches_wootters(self, fig2_params):
        t = np.linspace(0.01, 10, 5000)
        state = amplitudes(fig2_params, t)
        i = int(np.argmax(np.abs(state.beta) * np.abs(state.delta)))
        rho = density_matrix(state.at(i))
        closed = concurrence_cavities_closed(state.at(i).beta, state.at(i).delta)
        assert abs(concurrence(partial_trace_atoms(rho)) - closed) <= 1e-10

    def test_local_unitary_invariance(self):
        rng = np.random.default_rng(314)
        for _ in range(100):
            rho = density_matrix(random_amplitude_state(rng))
            at = 0.9 * partial_trace_cavities(rho).entries + 0.1 * np.eye(4) / 4
            u = np.kron(
                unitary_group.rvs(2, random_state=rng), unitary_group.rvs(2, random_state=rng)
            )
            rotated = u @ at @ u.conj().T
            rotated = 0.5 * (rotated + rotated.conj().T)
            before = concurrence(QubitPairDensity(at))
            after = concurrence(QubitPairDensity(rotated))
            assert abs(before - after) <= 1e-10

    @settings(max_examples=50, deadline=None)
    @given(
        theta=st.floats(0.05, np.pi / 2 - 0.05),
        phase=st.floats(0.0, 2 * np.pi),
        mix=st.floats(0.0, 1.0),
    )
    def test_bounded(self, theta, phase, mix):
        psi = np.zeros(4, dtype=complex)
        psi[Q10], psi[Q01] = np.cos(theta), np.sin(theta) * np.exp(1j * phase)
        rho = mix * np.outer(psi, psi.conj()) + (1 - mix) * projector(Q00)
        c = concurrence(QubitPairDensity(rho))
        assert 0.0 <= c <= 1.0
        assert c == pytest.approx(mix * np.sin(2 * theta), abs=1e-10)


class TestClosedForms:
    def test_initial(self):
        assert concurrence_atoms_closed(1, 0) == 0.0
        assert concurrence_cavities_closed(0, 0) == 0.0

    def test_equal_superposition(self):
        assert concurrence_atoms_closed(1 / np.sqrt(2), 1 / np.sqrt(2)) == pytest.approx(1.0)

    def test_rejects_unnormalizable(self):
        with pytest.raises(ValueError, match="unit norm"):
            concurrence_atoms_closed(1.0, 0.5)

    def test_vectorized(self):
        out = concurrence_atoms_closed(np.array([1.0, 0.6]), np.array([0.0, 0.8j]))
        np.testing.assert_allclose(out, [0.0, 0.96])

    def test_ideal_peak(self, fig3_ideal):
        state = amplitudes(fig3_ideal, 1.88)
        assert concurrence_atoms_closed(state.alpha, state.gamma) == pytest.approx(0.74, abs=0.01)

    def test_cavities_quiet_at_atom_peak(self, fig2_params):
        t = np.linspace(0, 10, 10_001)
        state = amplitudes(fig2_params, t)
        c_cav = concurrence_cavities_closed(state.beta, state.delta)
        at_peak = amplitudes(fig2_params, 1.88)
        assert concurrence_cavities_closed(at_peak.beta, at_peak.delta) < 0.1 * c_cav.max()
