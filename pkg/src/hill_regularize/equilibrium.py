"""Scalene-triangle relative equilibrium of three oblate primaries.

The side lengths ``u1`` (primary to tertiary) and ``u2`` (secondary to
tertiary) solve

    1/u**3 - 3*C_i3/u**5 = 1 - 3*C_12,

with the primary/secondary separation normalised to one.  The rotating-frame
coefficients ``lambda1 <= lambda2`` follow in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, MultipleRoots, NoRoot

BRACKET = (0.5, 1.5)
ABS_TOL = 1e-14


@dataclass(frozen=True)
class OblateBody:
    """A massive body with a second zonal harmonic."""

    mass: float
    radius: float
    c20: float

    def __post_init__(self):
        if not self.mass > 0:
            raise DomainError(f"mass must be positive, got {self.mass!r}")
        if not self.radius > 0:
            raise DomainError(f"radius must be positive, got {self.radius!r}")

    @property
    def C(self) -> float:
        """Unscaled oblateness ``c20 * R**2 / 2`` entering the equilibrium."""
        return self.c20 * self.radius**2 / 2.0


@dataclass(frozen=True)
class TriangleConfig:
    mu: float
    u1: float
    u2: float
    lambda1: float
    lambda2: float
    delta: float

    @classmethod
    def from_sides(cls, mu: float, u1: float, u2: float) -> "TriangleConfig":
        lam1, lam2, delta = lambdas(mu, u1, u2)
        return cls(mu, u1, u2, lam1, lam2, delta)


def side_residual(u: float, C: float, rhs: float) -> float:
    """Residual ``1/u**3 - 3*C/u**5 - rhs`` of one side equation."""
    if not u > 0:
        raise DomainError(f"side length must be positive, got {u!r}")
    return 1.0 / u**3 - 3.0 * C / u**5 - rhs


def _side_slope(u: float, C: float) -> float:
    return -3.0 / u**4 + 15.0 * C / u**6


def _solve_side(C: float, rhs: float) -> float:
    lo, hi = BRACKET
    # f' * u**6 = 15C - 3u**2 is monotone in u, so the endpoint signs decide.
    if _side_slope(lo, C) >= 0 or _side_slope(hi, C) >= 0:
        raise MultipleRoots(
            f"side equation with C={C!r} is not monotone on [{lo}, {hi}]"
        )
    f_lo = side_residual(lo, C, rhs)
    f_hi = side_residual(hi, C, rhs)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise NoRoot(f"no sign change on [{lo}, {hi}] for C={C!r}, rhs={rhs!r}")

    # f is decreasing: f(lo) > 0 > f(hi)
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        f_mid = side_residual(mid, C, rhs)
        if f_mid == 0.0:
            return mid
        if f_mid > 0:
            lo = mid
        else:
            hi = mid

    u = 0.5 * (lo + hi)
    for _ in range(50):
        f = side_residual(u, C, rhs)
        if f == 0.0:
            break
        step = f / _side_slope(u, C)
        u_next = u - step
        if not lo <= u_next <= hi:
            u_next = 0.5 * (lo + hi)
        if f > 0:
            lo = u
        else:
            hi = u
        u = u_next
        if abs(step) <= ABS_TOL:
            break
    return u


def solve_triangle(C1: float, C2: float, C3: float) -> tuple[float, float]:
    """Solve for the side lengths ``(u1, u2)`` of the relative equilibrium.

    Raises
    ------
    DomainError
        If ``1 - 3*(C1 + C2) <= 0``.
    NoRoot, MultipleRoots
        If a side equation has no unique root in ``BRACKET``.
    """
    rhs = 1.0 - 3.0 * (C1 + C2)
    if not rhs > 0:
        raise DomainError(f"1 - 3(C1 + C2) must be positive, got {rhs!r}")
    return _solve_side(C1 + C3, rhs), _solve_side(C2 + C3, rhs)


def triangle_residuals(u1, u2, C1, C2, C3):
    rhs = 1.0 - 3.0 * (C1 + C2)
    return side_residual(u1, C1 + C3, rhs), side_residual(u2, C2 + C3, rhs)


def discriminant(mu: float, u1: float, u2: float) -> float:
    poly = -u1**4 - u2**4 + 2 * u1**2 + 2 * u2**2 + 2 * u1**2 * u2**2 - 1
    return (mu * u1**3 + (1 - mu) * u2**3) ** 2 - mu * (1 - mu) * u1 * u2 * poly


def lambdas(mu: float, u1: float, u2: float) -> tuple[float, float, float]:
    """Return ``(lambda1, lambda2, delta)`` for mass ratio ``mu`` and sides.

    ``lambda1`` takes the minus branch of the square root.  A negative
    discriminant is reported as a :class:`DomainError`, never clamped.
    """
    if not 0.0 <= mu <= 1.0:
        raise DomainError(f"mu must lie in [0, 1], got {mu!r}")
    if not (u1 > 0 and u2 > 0):
        raise DomainError("side lengths must be positive")
    delta = discriminant(mu, u1, u2)
    if delta < 0:
        raise DomainError(f"negative discriminant delta={delta!r}")
    trace = (
        2.0
        - 2.0 * (1 - mu) / u1**5
        - 2.0 * mu / u2**5
        + 3.0 * (1 - mu) / u1**3
        + 3.0 * mu / u2**3
    )
    split = 3.0 / (u1**3 * u2**3) * math.sqrt(delta)
    return 0.5 * (trace - split), 0.5 * (trace + split), delta


def rescale_oblateness(c20: float, radius: float, m3: float) -> float:
    """Hill-rescaled oblateness ``m3**(-2/3) * c20 * radius**2 / 2``."""
    if not m3 > 0:
        raise DomainError(f"m3 must be positive, got {m3!r}")
    if not radius > 0:
        raise DomainError(f"radius must be positive, got {radius!r}")
    return m3 ** (-2.0 / 3.0) * c20 * radius**2 / 2.0


def relative_equilibrium(bodies) -> TriangleConfig:
    """Triangle configuration for three bodies ordered by decreasing mass."""
    b1, b2, b3 = bodies
    u1, u2 = solve_triangle(b1.C, b2.C, b3.C)
    return TriangleConfig.from_sides(b2.mass / (b1.mass + b2.mass), u1, u2)
