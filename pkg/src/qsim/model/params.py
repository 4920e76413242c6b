"""SystemParams — the physical parameter set of the two cascaded nodes.

Node A (source) and node B (target) each hold one two-level atom in one
cavity. Units: hbar = 1 and every rate is expressed in units of the total
cavity loss rate K (the equal-parameter presets have K_a = K_b = K = 1), so
times are in units of 1/K.
"""

from __future__ import annotations

import math
from enum import StrEnum

from pydantic import BaseModel, ConfigDict, Field, model_validator

RATE_FIELDS = (
    "kappa_a",
    "kappa_b",
    "kappa_prime_a",
    "kappa_prime_b",
    "gamma_a",
    "gamma_b",
)


class Node(StrEnum):
    A = "A"
    B = "B"


class SystemParams(BaseModel):
    """Couplings, rates, detunings and cascade phase of the two nodes.

    Validated at construction: rates are finite and nonnegative, and each
    cavity has at least one open loss channel (K_k > 0). Invalid values are
    rejected, never clamped.
    """

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    g_a: float  # atom-cavity coupling [rad/time]
    g_b: float
    kappa_a: float = Field(ge=0)  # cavity output coupling [1/time]
    kappa_b: float = Field(ge=0)
    kappa_prime_a: float = Field(ge=0)  # mirror absorption / scattering [1/time]
    kappa_prime_b: float = Field(ge=0)
    gamma_a: float = Field(ge=0)  # atomic spontaneous emission [1/time]
    gamma_b: float = Field(ge=0)
    delta_a: float  # atom-cavity detuning [rad/time]
    delta_b: float
    phi: float = 0.0  # cascade phase [rad]

    @model_validator(mode="after")
    def _check_total_loss(self) -> SystemParams:
        K_a, K_b = derived_rates(self)
        if K_a <= 0:
            raise ValueError("kappa_a + kappa_prime_a must be > 0 (cavity A needs a loss channel)")
        if K_b <= 0:
            raise ValueError("kappa_b + kappa_prime_b must be > 0 (cavity B needs a loss channel)")
        return self

    @property
    def K_a(self) -> float:
        return self.kappa_a + self.kappa_prime_a

    @property
    def K_b(self) -> float:
        return self.kappa_b + self.kappa_prime_b

    @classmethod
    def symmetric(
        cls,
        g: float,
        kappa: float,
        kappa_prime: float,
        gamma: float,
        delta: float,
        phi: float = 0.0,
    ) -> SystemParams:
        """Equal parameters for both nodes."""
        return cls(
            g_a=g,
            g_b=g,
            kappa_a=kappa,
            kappa_b=kappa,
            kappa_prime_a=kappa_prime,
            kappa_prime_b=kappa_prime,
            gamma_a=gamma,
            gamma_b=gamma,
            delta_a=delta,
            delta_b=delta,
            phi=phi,
        )

    def is_symmetric(self, rel_tol: float = 1e-12) -> bool:
        """True when both nodes share g, kappa, K, Delta and Gamma."""
        pairs = (
            (self.g_a, self.g_b),
            (self.kappa_a, self.kappa_b),
            (self.K_a, self.K_b),
            (self.delta_a, self.delta_b),
            (self.gamma_a, self.gamma_b),
        )
        return all(math.isclose(x, y, rel_tol=rel_tol, abs_tol=0.0) for x, y in pairs)

    def node(self, which: Node) -> tuple[float, float, float, float]:
        """(g, K, Delta, Gamma) of one node."""
        if which is Node.A:
            return self.g_a, self.K_a, self.delta_a, self.gamma_a
        return self.g_b, self.K_b, self.delta_b, self.gamma_b


def derived_rates(params: SystemParams) -> tuple[float, float]:
    """Total cavity loss rates (K_a, K_b) = (kappa_a + kappa'_a, kappa_b + kappa'_b)."""
    return (
        params.kappa_a + params.kappa_prime_a,
        params.kappa_b + params.kappa_prime_b,
    )
