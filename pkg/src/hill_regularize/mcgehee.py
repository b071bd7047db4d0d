"""McGehee blow-up of the collision singularity.

Coordinates ``(r, theta, v, w)`` are defined by

    x = r**gamma * exp(i theta),    y = r**(-gamma*beta) * (v + i w) * exp(i theta),

and the time change ``dt = r dtau`` turns the Hamilton equations into a
vector field that extends continuously to the collision set ``r = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dynamics import CartesianState
from .errors import DomainError, SingularState
from .params import HillParams, as_fraction, exponents

TWO_PI = 2.0 * math.pi

__all__ = [
    "McGeheeState",
    "EnergyLevel",
    "exponents",
    "to_mcgehee",
    "from_mcgehee",
    "regularized_field",
    "unscaled_field",
    "make_regularized_field",
    "physical_time_rate",
    "energy_residual",
    "energy_residual_array",
    "recover_physical_time",
    "rpow",
]


def rpow(r: float, p) -> float:
    """``r**p`` for ``r >= 0`` with ``0**p = 0`` for ``p > 0`` and ``r**0 = 1``."""
    if p == 0:
        return 1.0
    if r == 0.0:
        if p > 0:
            return 0.0
        raise SingularState(f"0 raised to negative power {p}")
    return r ** float(p)


@dataclass(frozen=True)
class McGeheeState:
    r: float
    theta: float
    v: float
    w: float
    tau: float = 0.0

    def __post_init__(self):
        if not self.r >= 0:
            raise DomainError(f"r must be nonnegative, got {self.r!r}")
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.theta, self.v, self.w], dtype=float)

    @classmethod
    def from_array(cls, arr, tau: float = 0.0) -> "McGeheeState":
        r, theta, v, w = (float(a) for a in arr)
        return cls(max(r, 0.0), theta, v, w, float(tau))


@dataclass(frozen=True)
class EnergyLevel:
    h: float


def to_mcgehee(state: CartesianState, beta, gamma) -> McGeheeState:
    """Forward transform; undefined at the origin."""
    beta = as_fraction(beta, "beta")
    gamma = as_fraction(gamma, "gamma")
    rho = math.hypot(state.x1, state.x2)
    if rho == 0.0:
        raise SingularState("McGehee transform undefined at |x| = 0")
    theta = math.atan2(state.x2, state.x1)
    c, s = math.cos(theta), math.sin(theta)
    # r**(gamma*beta) == |x|**beta
    scale = rho ** float(beta)
    return McGeheeState(
        r=rho ** float(1 / gamma),
        theta=theta,
        v=scale * (state.y1 * c + state.y2 * s),
        w=scale * (-state.y1 * s + state.y2 * c),
        tau=state.t,
    )


def from_mcgehee(state: McGeheeState, beta, gamma) -> CartesianState:
    """Inverse transform.  At ``r = 0`` only the rest state ``v = w = 0`` maps."""
    beta = as_fraction(beta, "beta")
    gamma = as_fraction(gamma, "gamma")
    c, s = math.cos(state.theta), math.sin(state.theta)
    if state.r == 0.0:
        if state.v != 0.0 or state.w != 0.0:
            raise SingularState("momentum is unbounded at r = 0 unless v = w = 0")
        return CartesianState(0.0, 0.0, 0.0, 0.0, state.tau)
    rg = rpow(state.r, gamma)
    inv = rpow(state.r, -gamma * beta)
    return CartesianState(
        x1=rg * c,
        x2=rg * s,
        y1=inv * (state.v * c - state.w * s),
        y2=inv * (state.v * s + state.w * c),
        t=state.tau,
    )


def _field_terms(params: HillParams):
    beta = params.beta
    gamma = params.gamma
    p_nu = 2 - gamma * (params.nu + 2)
    p_alpha = 2 - gamma * (params.alpha + 2)
    if p_nu < 0 or (params.c != 0 and p_alpha < 0):
        raise DomainError("exponents leave a singular term in the regularized field")
    return (
        float(beta),
        p_nu,
        p_alpha,
        float(params.nu),
        float(params.alpha) * params.c,
        params.A,
        params.B,
    )


def make_regularized_field(params: HillParams):
    """Return ``f(tau, y)`` for ``y = [r, theta, v, w]`` (theta unwrapped)."""
    beta, p_nu, p_alpha, nu, ac, A, B = _field_terms(params)
    two_a, two_b, two_amb = 2.0 * A, 2.0 * B, 2.0 * (A - B)

    def field(tau, y):
        r, theta, v, w = y
        # fractional powers see |r|; r' keeps the sign so r = 0 stays invariant
        ra = abs(r)
        c, s = math.cos(theta), math.sin(theta)
        r2 = r * r
        dv = beta * v * v + w * w - nu * rpow(ra, p_nu) - two_a * r2 * c * c - two_b * r2 * s * s
        if ac != 0.0:
            dv -= ac * rpow(ra, p_alpha)
        return np.array(
            [
                (beta + 1.0) * v * r,
                w - r,
                dv,
                (beta - 1.0) * v * w + two_amb * r2 * s * c,
            ]
        )

    return field


def regularized_field(state: McGeheeState, params: HillParams) -> np.ndarray:
    """Derivative ``(r', theta', v', w')`` with respect to the rescaled time."""
    return make_regularized_field(params)(state.tau, state.as_array())


def unscaled_field(state: McGeheeState, params: HillParams) -> np.ndarray:
    """Derivative with respect to physical time ``t``; singular at ``r = 0``."""
    if state.r == 0.0:
        raise SingularState("the unscaled McGehee field has a singularity at r = 0")
    return regularized_field(state, params) / state.r


def physical_time_rate(r: float) -> float:
    """``dt/dtau = r``."""
    if r < 0:
        raise DomainError(f"r must be nonnegative, got {r!r}")
    return r


def energy_residual_array(y, params: HillParams, h: float) -> float:
    r, theta, v, w = y[0], y[1], y[2], y[3]
    c, s = math.cos(theta), math.sin(theta)
    gamma = params.gamma
    value = (
        0.5 * (v * v + w * w)
        - r * w
        + r * r * (params.A * c * c + params.B * s * s)
        - rpow(r, 2 - gamma * (params.nu + 2))
        - rpow(r, 2 - 2 * gamma) * h
    )
    if params.c != 0.0:
        value -= params.c * rpow(r, 2 - gamma * (params.alpha + 2))
    return value


def energy_residual(state: McGeheeState, params: HillParams, h: float) -> float:
    """Energy condition ``H = h`` multiplied through by ``r**(2 - 2 gamma)``.

    Zero exactly on the energy manifold; at ``r = 0`` (standard exponents)
    it reduces to ``(v**2 + w**2 - 2c)/2``.
    """
    return energy_residual_array(
        (state.r, state.theta, state.v, state.w), params, h
    )


def recover_physical_time(samples, t0: float = 0.0) -> np.ndarray:
    """Integrate ``dt = r dtau`` over ``(tau, r)`` samples.

    Each interval is integrated with the quadratic through it and its
    neighbour (composite Simpson on an irregular grid).  If that estimate is
    negative, which a nonnegative ``r`` cannot produce, the interval falls
    back to the trapezoid rule so that ``t`` stays nondecreasing.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DomainError("samples must be a sequence of (tau, r) pairs")
    tau, r = arr[:, 0], arr[:, 1]
    n = len(tau)
    out = np.full(n, float(t0))
    if n < 2:
        return out
    h = np.diff(tau)
    if not (np.all(h > 0) or np.all(h < 0)):
        raise DomainError("samples must be strictly sorted by tau")
    trap = 0.5 * h * (r[:-1] + r[1:])
    if n == 2:
        return t0 + np.concatenate(([0.0], np.cumsum(trap)))

    inc = np.empty(n - 1)
    # interval i from nodes (i, i+1, i+2): integral over the first sub-interval
    h0, h1 = h[:-1], h[1:]
    f0, f1, f2 = r[:-2], r[1:-1], r[2:]
    inc[:-1] = (
        f0 * h0 * (2 * h0 + 3 * h1) / (6 * (h0 + h1))
        + f1 * h0 * (h0 + 3 * h1) / (6 * h1)
        - f2 * h0**3 / (6 * h1 * (h0 + h1))
    )
    # last interval from nodes (n-3, n-2, n-1): integral over the second one
    g0, g1 = h[-2], h[-1]
    inc[-1] = (
        -r[-3] * g1**3 / (6 * g0 * (g0 + g1))
        + r[-2] * g1 * (3 * g0 + g1) / (6 * g0)
        + r[-1] * g1 * (3 * g0 + 2 * g1) / (6 * (g0 + g1))
    )
    bad = np.sign(inc) * np.sign(h) < 0
    inc[bad] = trap[bad]
    return t0 + np.concatenate(([0.0], np.cumsum(inc)))
