"""Shared test fixtures for qsim.

Provides:
- fig2_params: the occupation-probability preset (g=5, kappa=0.9, Delta=0.1, Gamma=0.2)
- fig3_ideal / fig3_lossy / fig3_lossy_atoms: the three concurrence-peak variants
- unequal_params: a general parameter set with different nodes and phi != 0
- critical_params: equal nodes at g = K/4 with Delta = Gamma = 0, where Omega = 0
- bare_params: factory for degenerate sets (all zero unless given), built without validation
- random_params: factory for random valid unequal sets from a seeded generator
"""

from __future__ import annotations

from collections.abc import Callable

import numpy as np
import pytest

from qsim.model.params import SystemParams
from qsim.presets import loss_params

ZERO_FIELDS = dict.fromkeys(SystemParams.model_fields, 0.0)


@pytest.fixture
def fig2_params() -> SystemParams:
    return loss_params(kappa=0.9, gamma=0.2)


@pytest.fixture
def fig3_ideal() -> SystemParams:
    return loss_params(kappa=1.0, gamma=0.0)


@pytest.fixture
def fig3_lossy() -> SystemParams:
    return loss_params(kappa=0.9, gamma=0.0)


@pytest.fixture
def fig3_lossy_atoms() -> SystemParams:
    return loss_params(kappa=0.9, gamma=0.2)


@pytest.fixture
def unequal_params() -> SystemParams:
    """g_a=5, g_b=4, K_a=1, K_b=1.2, Delta=+-0.1, Gamma=0.2/0.1, kappa=0.9/1.0, phi=0.3."""
    return SystemParams(
        g_a=5.0,
        g_b=4.0,
        kappa_a=0.9,
        kappa_b=1.0,
        kappa_prime_a=0.1,
        kappa_prime_b=0.2,
        gamma_a=0.2,
        gamma_b=0.1,
        delta_a=0.1,
        delta_b=-0.1,
        phi=0.3,
    )


@pytest.fixture
def critical_params() -> SystemParams:
    return SystemParams.symmetric(g=0.25, kappa=1.0, kappa_prime=0.0, gamma=0.0, delta=0.0)


@pytest.fixture
def bare_params() -> Callable[..., SystemParams]:
    """SystemParams with every field 0 except the overrides, skipping validation.

    Degenerate sets (zero cavity loss) break K > 0 but are still meaningful
    inputs for the operator builders and the integrators.
    """

    def make(**overrides: float) -> SystemParams:
        return SystemParams.model_construct(**{**ZERO_FIELDS, **overrides})

    return make


def make_random_params(rng: np.random.Generator) -> SystemParams:
    return SystemParams(
        g_a=rng.uniform(0.5, 5.0),
        g_b=rng.uniform(0.5, 5.0),
        kappa_a=rng.uniform(0.2, 1.0),
        kappa_b=rng.uniform(0.2, 1.0),
        kappa_prime_a=rng.uniform(0.0, 0.4),
        kappa_prime_b=rng.uniform(0.0, 0.4),
        gamma_a=rng.uniform(0.0, 0.4),
        gamma_b=rng.uniform(0.0, 0.4),
        delta_a=rng.uniform(-0.5, 0.5),
        delta_b=rng.uniform(-0.5, 0.5),
        phi=rng.uniform(0.0, 2 * np.pi),
    )


@pytest.fixture
def random_params() -> Callable[[int], list[SystemParams]]:
    """n random unequal parameter sets, reproducible per call."""

    def make(n: int, seed: int = 2024) -> list[SystemParams]:
        rng = np.random.default_rng(seed)
        return [make_random_params(rng) for _ in range(n)]

    return make
