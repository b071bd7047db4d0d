"""Parameters of the quasi-homogeneous Hill Hamiltonian.

Exponents are carried as :class:`fractions.Fraction` so that the
regularizability classification stays exact; coefficients are floats.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Union

from .errors import DomainError

RationalLike = Union[int, str, Fraction]
Mode = Literal["standard", "newtonian-limit"]
MODES = ("standard", "newtonian-limit")


def as_fraction(value, name="value") -> Fraction:
    """Convert ints, strings like ``"4/3"`` or Fractions to a Fraction.

    Floats are rejected because they would silently break exact arithmetic.
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"{name} must be an exact rational, got {value!r}")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"cannot parse {name}={value!r} as a rational") from exc


def exponents(nu, alpha, mode: Mode = "standard") -> tuple[Fraction, Fraction]:
    """Blow-up exponents ``(beta, gamma)``.

    ``standard`` scales by the stronger singular term: ``beta = alpha/2``,
    ``gamma = 2/(alpha + 2)``.  ``newtonian-limit`` is for ``c = 0`` and
    scales by the Newtonian term: ``beta = nu/2``, ``gamma = 2/(nu + 2)``.
    """
    nu = as_fraction(nu, "nu")
    alpha = as_fraction(alpha, "alpha")
    if mode == "standard":
        if not 1 <= nu < alpha:
            raise DomainError(f"standard mode needs 1 <= nu < alpha, got {nu}, {alpha}")
        return alpha / 2, Fraction(2) / (alpha + 2)
    if mode == "newtonian-limit":
        if not nu >= 1:
            raise DomainError(f"newtonian-limit mode needs nu >= 1, got {nu}")
        return nu / 2, Fraction(2) / (nu + 2)
    raise DomainError(f"unknown exponent mode {mode!r}")


@dataclass(frozen=True)
class HillParams:
    """Coefficients of ``H = |y|^2/2 + x2 y1 - x1 y2 + A x1^2 + B x2^2
    - |x|^-nu - c |x|^-alpha``."""

    A: float
    B: float
    c: float
    nu: Fraction = Fraction(1)
    alpha: Fraction = Fraction(3)
    mode: Mode = "standard"
    beta: Fraction = field(init=False)
    gamma: Fraction = field(init=False)

    def __post_init__(self):
        nu = as_fraction(self.nu, "nu")
        alpha = as_fraction(self.alpha, "alpha")
        if not 1 <= nu < alpha:
            raise DomainError(f"need 1 <= nu < alpha, got nu={nu}, alpha={alpha}")
        if self.mode == "newtonian-limit" and self.c != 0:
            raise DomainError("newtonian-limit exponents require c = 0")
        beta, gamma = exponents(nu, alpha, self.mode)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "A", float(self.A))
        object.__setattr__(self, "B", float(self.B))
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "gamma", gamma)

    def as_dict(self) -> dict:
        return {
            "A": self.A,
            "B": self.B,
            "c": self.c,
            "nu": str(self.nu),
            "alpha": str(self.alpha),
            "beta": str(self.beta),
            "gamma": str(self.gamma),
            "mode": self.mode,
        }
