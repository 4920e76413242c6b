"""Closed-form no-jump amplitudes and the reconstructed density operator.

Starting from |a> at t = 0, the no-jump vector is
alpha|a> + beta|b> + gamma|c> + delta|d>. Node A evolves on its own:

    alpha(t) = [(K_a/2 - i z_a) sinh(W_a t/2)/W_a + cosh(W_a t/2)] e^{c_a t}
    beta(t)  = -2i g_a sinh(W_a t/2)/W_a e^{c_a t}

with z_k = Delta_k - i Gamma_k/2, c_k = -(K_k + Gamma_k)/4 - i Delta_k/2 and
W_k^2 = K_k^2/4 - 4 g_k^2 - i K_k z_k - z_k^2. Node B is driven through
beta, which gives gamma and delta in terms of the helpers f+-, g+-, h+-.
Where some W_k vanishes those helpers are singular, and gamma and delta are
read off the divided differences of e^{lambda t} over the four node exponents
c_k +- W_k/2 instead.

All evaluators accept a scalar time or a numpy array of times. Results are
even in each W_k, so the principal square-root branch is as good as any.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import expm

from qsim.model.params import Node, SystemParams
from qsim.model.states import AmplitudeState, DensityMatrix5, E, StateError

logger = logging.getLogger(__name__)

# (e^{xt} - 1)/x switches to its Taylor series when
# |x| max(1, t) < SERIES_THRESHOLD * max(|W_a|, |W_b|, 1).
SERIES_THRESHOLD = 1e-6
SYMMETRY_RTOL = 1e-12
# |W_k| below CONFLUENT_OMEGA * max(|W_a|, |W_b|, 1) uses the divided-difference form
CONFLUENT_OMEGA = 1e-3

Times = float | NDArray[np.float64]
Amplitude = complex | NDArray[np.complex128]


class ParameterMismatchError(ValueError):
    """Equal-parameter formula requested for unequal nodes."""


@dataclass(frozen=True)
class OmegaConstants:
    omega_a: complex
    omega_b: complex
    upsilon: float  # (K_a - K_b + Gamma_a - Gamma_b)/4
    lambda_: float  # (Delta_a - Delta_b)/2

    @property
    def scale(self) -> float:
        return max(abs(self.omega_a), abs(self.omega_b), 1.0)


def omega(params: SystemParams, node: Node) -> complex:
    """Principal square root of K^2/4 - 4g^2 - iK(Delta - i Gamma/2) - (Delta - i Gamma/2)^2."""
    g, K, delta, gamma = params.node(node)
    z = complex(delta, -gamma / 2)
    return cmath.sqrt(K**2 / 4 - 4 * g**2 - 1j * K * z - z**2)


def omega_constants(params: SystemParams) -> OmegaConstants:
    return OmegaConstants(
        omega_a=omega(params, Node.A),
        omega_b=omega(params, Node.B),
        upsilon=(params.K_a - params.K_b + params.gamma_a - params.gamma_b) / 4,
        lambda_=(params.delta_a - params.delta_b) / 2,
    )


# ── helpers ───────────────────────────────────────────────────────


def _as_times(t: ArrayLike) -> NDArray[np.float64]:
    times = np.asarray(t, dtype=np.float64)
    if np.any(times < 0):
        raise ValueError("t must be >= 0")
    return times


def _out(value: NDArray[np.complex128]) -> Amplitude:
    return complex(value) if np.ndim(value) == 0 else value


def _expm1_over(x: complex, t: NDArray[np.float64], scale: float) -> NDArray[np.complex128]:
    """(e^{xt} - 1)/x, with the four-term series near x = 0 (limit: t)."""
    xt = x * t
    series = t * (1 + xt / 2 + xt**2 / 6 + xt**3 / 24)
    if x == 0:
        return series.astype(np.complex128)
    direct = np.expm1(xt) / x
    near_zero = abs(x) * np.maximum(1.0, t) < SERIES_THRESHOLD * scale
    return np.where(near_zero, series, direct)


def _sinh_over(w: complex, t: NDArray[np.float64]) -> NDArray[np.complex128]:
    """sinh(w t/2)/w, tending to t/2 as w -> 0."""
    half = w * t / 2
    series = (t / 2) * (1 + half**2 / 6 + half**4 / 120)
    if w == 0:
        return series.astype(np.complex128)
    near_zero = abs(w) * np.maximum(1.0, t) < SERIES_THRESHOLD
    return np.where(near_zero, series, np.sinh(half) / w)


def _divided_differences(
    nodes: tuple[complex, complex, complex, complex], t: NDArray[np.float64]
) -> NDArray[np.complex128]:
    """expm(t Z) for Z = diag(nodes) + ones on the superdiagonal.

    Entry [i, j] is the divided difference of e^{lambda t} over nodes[i..j], so
    repeated nodes (any W_k = 0) need no special casing.
    """
    z = np.diag(np.asarray(nodes, dtype=np.complex128)) + np.diag(np.ones(3), 1)
    return expm(t[..., None, None] * z)


# ── node A ────────────────────────────────────────────────────────


def _alpha_beta_from(
    params: SystemParams, consts: OmegaConstants, t: NDArray[np.float64]
) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    w = consts.omega_a
    z = complex(params.delta_a, -params.gamma_a / 2)
    envelope = np.exp((-(params.K_a + params.gamma_a) / 4 - 0.5j * params.delta_a) * t)
    s = _sinh_over(w, t)
    alpha = ((params.K_a / 2 - 1j * z) * s + np.cosh(w * t / 2)) * envelope
    beta = -2j * params.g_a * s * envelope
    return alpha, beta


def alpha_beta(params: SystemParams, t: ArrayLike) -> tuple[Amplitude, Amplitude]:
    """Source-node amplitudes for alpha(0) = 1, beta(0) = 0."""
    alpha, beta = _alpha_beta_from(params, omega_constants(params), _as_times(t))
    return _out(alpha), _out(beta)


# ── node B ────────────────────────────────────────────────────────


def _gamma_delta_from(
    params: SystemParams, consts: OmegaConstants, t: NDArray[np.float64]
) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    w_a, w_b = consts.omega_a, consts.omega_b
    scale = consts.scale
    if min(abs(w_a), abs(w_b)) < CONFLUENT_OMEGA * scale:
        return _gamma_delta_confluent(params, consts, t)
    c_b = -(params.K_b + params.gamma_b) / 4 - 0.5j * params.delta_b
    drive = (
        params.g_a
        * math.sqrt(params.kappa_a * params.kappa_b)
        * cmath.exp(1j * params.phi)
        / (w_a * w_b)
    )
    f_plus = drive * np.exp((c_b + w_b / 2) * t)
    f_minus = drive * np.exp((c_b - w_b / 2) * t)

    shift = complex(consts.upsilon, consts.lambda_)
    g_plus = _expm1_over((w_a + w_b) / 2 - shift, t, scale)
    g_minus = _expm1_over((w_a - w_b) / 2 - shift, t, scale)
    # h(x) = (e^{-xt} - 1)/x = -(e^{(-x)t} - 1)/(-x)
    h_plus = -_expm1_over(-((w_a + w_b) / 2 + shift), t, scale)
    h_minus = -_expm1_over(-((w_a - w_b) / 2 + shift), t, scale)

    branch_plus = f_plus * (g_minus + h_plus)
    branch_minus = f_minus * (g_plus + h_minus)
    q = (params.K_b - params.gamma_b) / 4 - 0.5j * params.delta_b
    gamma = params.g_b * (branch_plus - branch_minus)
    delta = 1j * (q + w_b / 2) * branch_minus - 1j * (q - w_b / 2) * branch_plus
    return gamma, delta


def _gamma_delta_confluent(
    params: SystemParams, consts: OmegaConstants, t: NDArray[np.float64]
) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    """gamma, delta for any W_a, W_b, including zero.

    With D[i..j] the divided differences over (c_b + W_b/2, c_a + W_a/2,
    c_a - W_a/2, c_b - W_b/2) and s = sqrt(kappa_a kappa_b) e^{i phi}:

        gamma = s g_a g_b D[0..3]
        delta = i s g_a [(D[0..2] + D[1..3])/2 - q_b D[0..3]]
    """
    w_a, w_b = consts.omega_a, consts.omega_b
    c_a = -(params.K_a + params.gamma_a) / 4 - 0.5j * params.delta_a
    c_b = -(params.K_b + params.gamma_b) / 4 - 0.5j * params.delta_b
    q_b = (params.K_b - params.gamma_b) / 4 - 0.5j * params.delta_b
    dd = _divided_differences((c_b + w_b / 2, c_a + w_a / 2, c_a - w_a / 2, c_b - w_b / 2), t)
    s = math.sqrt(params.kappa_a * params.kappa_b) * cmath.exp(1j * params.phi)
    full = dd[..., 0, 3]
    gamma = s * params.g_a * params.g_b * full
    delta = 1j * s * params.g_a * ((dd[..., 0, 2] + dd[..., 1, 3]) / 2 - q_b * full)
    return gamma, delta


def gamma_delta_general(params: SystemParams, t: ArrayLike) -> tuple[Amplitude, Amplitude]:
    """Target-node amplitudes for gamma(0) = delta(0) = 0, any parameters."""
    gamma, delta = _gamma_delta_from(params, omega_constants(params), _as_times(t))
    return _out(gamma), _out(delta)


def _gamma_delta_equal_from(
    params: SystemParams, w: complex, t: NDArray[np.float64]
) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    if abs(w) < CONFLUENT_OMEGA:
        # near critical coupling 1/W^3 cancels; same limit as the general form
        return _gamma_delta_confluent(params, omega_constants(params), t)
    g, kappa, K, gamma_rate, det = (
        params.g_a,
        params.kappa_a,
        params.K_a,
        params.gamma_a,
        params.delta_a,
    )
    c = -(K + gamma_rate) / 4 - 0.5j * det
    q = (K - gamma_rate) / 4 - 0.5j * det
    wt = w * t
    rising = np.expm1(wt) - wt  # e^{Wt} - Wt - 1
    falling = np.expm1(-wt) + wt  # e^{-Wt} + Wt - 1
    env_plus = np.exp((c + w / 2) * t)
    env_minus = np.exp((c - w / 2) * t)
    phase = cmath.exp(1j * params.phi)
    pref = kappa * g**2 * phase / w**3
    gamma = pref * (falling * env_plus - rising * env_minus)
    pref_d = 1j * kappa * g * phase / w**3
    delta = pref_d * ((q + w / 2) * rising * env_minus - (q - w / 2) * falling * env_plus)
    return gamma, delta


def gamma_delta_equal(params: SystemParams, t: ArrayLike) -> tuple[Amplitude, Amplitude]:
    """Target-node amplitudes when both nodes share every parameter."""
    if not params.is_symmetric(SYMMETRY_RTOL):
        raise ParameterMismatchError(
            "gamma_delta_equal requires g, kappa, K, Delta and Gamma equal for both nodes; "
            "use gamma_delta_general"
        )
    gamma, delta = _gamma_delta_equal_from(params, omega(params, Node.A), _as_times(t))
    return _out(gamma), _out(delta)


# ── full state ────────────────────────────────────────────────────


def amplitudes(params: SystemParams, t: ArrayLike) -> AmplitudeState:
    """No-jump state at t (scalar or array), picking the equal-parameter form when it applies."""
    times = _as_times(t)
    alpha, beta = _alpha_beta_from(params, omega_constants(params), times)
    if params.is_symmetric(SYMMETRY_RTOL):
        gamma, delta = _gamma_delta_equal_from(params, omega(params, Node.A), times)
    else:
        gamma, delta = _gamma_delta_from(params, omega_constants(params), times)
    t_out = float(times) if times.ndim == 0 else times
    return AmplitudeState.from_amplitudes(
        t_out, _out(alpha), _out(beta), _out(gamma), _out(delta)
    )


def p_no(state: AmplitudeState) -> float | NDArray[np.float64]:
    """Probability that no jump has happened yet: the squared norm of the no-jump vector."""
    value = (
        np.abs(state.alpha) ** 2
        + np.abs(state.beta) ** 2
        + np.abs(state.gamma) ** 2
        + np.abs(state.delta) ** 2
    )
    return float(value) if np.ndim(value) == 0 else value


def p_yes(state: AmplitudeState) -> float | NDArray[np.float64]:
    """Probability that the single jump has already happened."""
    return 1.0 - p_no(state)


def density_matrix(state: AmplitudeState) -> DensityMatrix5:
    """rho(t) = |psi_no><psi_no| + |eps|^2 |e><e| for a single time sample."""
    if np.ndim(state.alpha) != 0:
        raise ValueError("density_matrix takes a single time sample; use AmplitudeState.at()")
    psi = state.vector()
    rho = np.outer(psi, psi.conj())
    rho[E, E] += state.eps_sq
    return DensityMatrix5(rho, float(state.t))


def conditioned_density(state: AmplitudeState) -> DensityMatrix5:
    """Normalized no-jump state |psi_no><psi_no| / <psi_no|psi_no>."""
    if np.ndim(state.alpha) != 0:
        raise ValueError("conditioned_density takes a single time sample")
    norm = p_no(state)
    if norm <= 0:
        raise StateError(f"no-jump branch has zero weight at t={state.t}")
    psi = state.vector()
    return DensityMatrix5(np.outer(psi, psi.conj()) / norm, float(state.t))
