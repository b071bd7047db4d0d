"""Planar Hill Hamiltonian and its Hamilton equations in Cartesian form."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularState
from .params import HillParams


@dataclass(frozen=True)
class CartesianState:
    x1: float
    x2: float
    y1: float
    y2: float
    t: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.y1, self.y2], dtype=float)

    @classmethod
    def from_array(cls, arr, t: float = 0.0) -> "CartesianState":
        x1, x2, y1, y2 = (float(a) for a in arr)
        return cls(x1, x2, y1, y2, float(t))


def hill_params_from_equilibrium(config, c3: float) -> HillParams:
    """Coefficients of the oblate Hill problem: ``nu = 1``, ``alpha = 3``.

    ``A = (1 - lambda2)/2``, ``B = (1 - lambda1)/2`` and ``c = -c3``, so an
    oblate tertiary (``c3 < 0``) gives an attracting ``c > 0`` term.
    """
    return HillParams(
        A=(1.0 - config.lambda2) / 2.0,
        B=(1.0 - config.lambda1) / 2.0,
        c=0.0 - c3,
        nu=1,
        alpha=3,
    )


def _radius(x1: float, x2: float) -> float:
    rho = math.hypot(x1, x2)
    if rho == 0.0:
        raise SingularState("position at the origin (collision)")
    return rho


def hamiltonian_array(y, params: HillParams) -> float:
    x1, x2, p1, p2 = y
    rho = _radius(x1, x2)
    return (
        0.5 * (p1 * p1 + p2 * p2)
        + x2 * p1
        - x1 * p2
        + params.A * x1 * x1
        + params.B * x2 * x2
        - rho ** -float(params.nu)
        - params.c * rho ** -float(params.alpha)
    )


def hamiltonian(state: CartesianState, params: HillParams) -> float:
    """Energy of ``state``; raises :class:`SingularState` at the origin."""
    return hamiltonian_array((state.x1, state.x2, state.y1, state.y2), params)


def make_cartesian_field(params: HillParams):
    """Return ``f(t, y)`` evaluating the Hamilton equations on arrays."""
    nu = float(params.nu)
    alpha = float(params.alpha)
    ac = alpha * params.c
    two_a = 2.0 * params.A
    two_b = 2.0 * params.B

    def field(t, y):
        x1, x2, p1, p2 = y
        rho = _radius(x1, x2)
        # central force magnitude over |x|
        k = nu * rho ** -(nu + 2.0) + ac * rho ** -(alpha + 2.0)
        return np.array(
            [
                p1 + x2,
                p2 - x1,
                -k * x1 + p2 - two_a * x1,
                -k * x2 - p1 - two_b * x2,
            ]
        )

    return field


def vector_field(state: CartesianState, params: HillParams) -> np.ndarray:
    """Time derivative ``(dx1, dx2, dy1, dy2)`` at ``state``."""
    return make_cartesian_field(params)(state.t, state.as_array())
