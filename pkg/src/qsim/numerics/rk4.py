"""Classic fixed-step fourth-order Runge-Kutta.

``rk4_step`` is the generic kernel. For linear autonomous right-hand sides
(both the no-jump Schrodinger equation and the Lindblad equation are) one RK4
step is a fixed matrix, the degree-4 Taylor polynomial of exp(M dt).
``linear_step_propagator`` builds that matrix by pushing a basis through
``rk4_step``, so repeated stepping becomes repeated matrix products.
"""

from __future__ import annotations

from collections.abc import Callable

import numpy as np
from numpy.typing import NDArray

Derivative = Callable[[float, NDArray[np.complex128]], NDArray[np.complex128]]


def rk4_step(
    derivative: Derivative,
    t: float,
    state: NDArray[np.complex128],
    dt: float,
) -> NDArray[np.complex128]:
    """Advance ``state`` from t to t + dt. The input array is never mutated.

    ``derivative(t, y)`` must return an array of the same shape as ``y``; any
    shape works, including stacks of matrices.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    k1 = derivative(t, state)
    k2 = derivative(t + 0.5 * dt, state + 0.5 * dt * k1)
    k3 = derivative(t + 0.5 * dt, state + 0.5 * dt * k2)
    k4 = derivative(t + dt, state + dt * k3)
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def linear_step_propagator(
    derivative: Derivative,
    shape: tuple[int, ...],
    dt: float,
) -> NDArray[np.complex128]:
    """Matrix P with vec(rk4_step(derivative, 0, y, dt)) == P @ vec(y).

    ``derivative`` must be linear in ``y``, time independent, and accept a
    leading batch axis (it is called once on the stack of all unit arrays of
    ``shape``). vec() is C-order ravel.
    """
    n = int(np.prod(shape))
    units = np.eye(n, dtype=np.complex128).reshape((n, *shape))
    images = rk4_step(derivative, 0.0, units, dt)
    # Row k of images.reshape(n, n) is the image of unit k, i.e. column k of P.
    return np.ascontiguousarray(images.reshape(n, n).T)
