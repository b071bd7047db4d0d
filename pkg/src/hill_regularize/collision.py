"""Dynamics on the collision manifold and regularizability classification.

On ``r = 0`` the regularized flow reduces to

    theta' = w,   v' = beta v^2 + w^2 - alpha c,   w' = (beta - 1) v w,

whose ``(v, w)`` part carries the first integral
``K = |w|^alpha |v^2 + w^2 - 2c|^(1 - beta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Literal, Optional, Sequence

import numpy as np

from .errors import DivergentValue, DomainError
from .params import as_fraction

Kind = Literal["saddle", "source", "sink", "center", "degenerate"]


@dataclass(frozen=True)
class ReducedState:
    v: float
    w: float
    theta: float = 0.0


@dataclass(frozen=True)
class CollisionManifold:
    """The set ``{r = 0, v^2 + w^2 = 2c}``, a torus when ``c > 0``."""

    c: float

    @property
    def radius_sq(self) -> float:
        return 2.0 * self.c

    @property
    def is_empty(self) -> bool:
        return self.c < 0

    @property
    def is_point(self) -> bool:
        return self.c == 0


@dataclass(frozen=True)
class EquilibriumPoint:
    name: str
    location: tuple[float, float]
    eigenvalues: tuple[complex, complex]
    kind: Kind

    def as_dict(self) -> dict:
        ev = []
        for lam in self.eigenvalues:
            lam = complex(lam)
            ev.append(lam.real if lam.imag == 0 else [lam.real, lam.imag])
        return {
            "name": self.name,
            "v": self.location[0],
            "w": self.location[1],
            "eigenvalues": ev,
            "kind": self.kind,
        }


@dataclass(frozen=True)
class RegularizabilityReport:
    gamma_p: int
    gamma_q: int
    second_ratio_p: Optional[int]
    second_ratio_q: Optional[int]
    branch: bool
    extension: Literal["reflection", "transmission", "none"]
    block: bool
    beta: Fraction
    mode: Literal["single-term", "two-term"]

    @property
    def gamma(self) -> Fraction:
        return Fraction(self.gamma_p, self.gamma_q)

    def as_dict(self) -> dict:
        return {
            "gamma": f"{self.gamma_p}/{self.gamma_q}",
            "gamma_p": self.gamma_p,
            "gamma_q": self.gamma_q,
            "second_ratio": (
                None
                if self.second_ratio_p is None
                else f"{self.second_ratio_p}/{self.second_ratio_q}"
            ),
            "second_ratio_p": self.second_ratio_p,
            "second_ratio_q": self.second_ratio_q,
            "branch": self.branch,
            "extension": self.extension,
            "block": self.block,
            "beta": str(self.beta),
            "mode": self.mode,
        }


def reduced_field(state: ReducedState, beta, alpha, c: float) -> tuple[float, float, float]:
    """``(theta', v', w')`` of the flow restricted to ``r = 0``."""
    b = float(beta)
    v, w = state.v, state.w
    return w, b * v * v + w * w - float(alpha) * c, (b - 1.0) * v * w


def make_reduced_field(beta, alpha, c: float):
    """Array field on ``[theta, v, w]`` for the integrator."""
    b = float(beta)
    ac = float(alpha) * c

    def f(tau, y):
        _, v, w = y
        return np.array([w, b * v * v + w * w - ac, (b - 1.0) * v * w])

    return f


def integral_K(v: float, w: float, alpha, beta, c: float) -> float:
    """First integral ``|w|^alpha |v^2 + w^2 - 2c|^(1 - beta)``."""
    a = float(alpha)
    e = 1.0 - float(beta)
    dist = abs(v * v + w * w - 2.0 * c)
    if w == 0.0:
        return 0.0
    if dist == 0.0:
        if e < 0:
            raise DivergentValue("K diverges on the invariant circle when beta > 1")
        return 0.0 if e > 0 else abs(w) ** a
    return abs(w) ** a * dist**e


def _classify_eigs(eigs) -> Kind:
    re = [complex(x).real for x in eigs]
    im = [complex(x).imag for x in eigs]
    if all(x == 0 for x in re) and all(i != 0 for i in im):
        return "center"
    if any(x == 0 for x in re):
        return "degenerate"
    if re[0] > 0 and re[1] > 0:
        return "source"
    if re[0] < 0 and re[1] < 0:
        return "sink"
    return "saddle"


def reduced_jacobian(v: float, w: float, beta, alpha=None) -> np.ndarray:
    b = float(beta)
    return np.array([[2 * b * v, 2 * w], [(b - 1) * w, (b - 1) * v]])


def equilibria(alpha, beta, c: float) -> list[EquilibriumPoint]:
    """Equilibria of the reduced ``(v, w)`` system with closed-form eigenvalues.

    For ``c > 0`` these are the saddles ``S+-`` on the ``w`` axis and the
    source/sink pair ``Q+-`` on the ``v`` axis; ``c = 0`` leaves one degenerate
    point at the origin and ``c < 0`` none.
    """
    a = float(alpha)
    b = float(beta)
    if c < 0:
        return []
    if c == 0:
        return [EquilibriumPoint("O", (0.0, 0.0), (0.0, 0.0), "degenerate")]
    if b <= 0:
        raise DomainError("beta must be positive")
    points = []
    w_s = math.sqrt(a * c)
    disc = 2.0 * (b - 1.0) * a * c
    lam_s = math.sqrt(disc) if disc >= 0 else complex(0.0, math.sqrt(-disc))
    for sign, name in ((1.0, "S+"), (-1.0, "S-")):
        eigs = (lam_s, -lam_s)
        points.append(EquilibriumPoint(name, (0.0, sign * w_s), eigs, _classify_eigs(eigs)))
    # Q+- sits at v^2 = alpha c / beta, which is 2c when alpha = 2 beta
    v_q = math.sqrt(a * c / b)
    for sign, name in ((1.0, "Q+"), (-1.0, "Q-")):
        eigs = (sign * 2.0 * b * v_q, sign * (b - 1.0) * v_q)
        points.append(EquilibriumPoint(name, (sign * v_q, 0.0), eigs, _classify_eigs(eigs)))
    return points


@dataclass(frozen=True)
class ScanRow:
    c: float
    equilibria: list = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.equilibria)

    @property
    def kinds(self) -> list[str]:
        return [p.kind for p in self.equilibria]

    @property
    def max_pairwise_distance(self) -> float:
        pts = [p.location for p in self.equilibria]
        if len(pts) < 2:
            return 0.0
        return max(math.dist(p, q) for p, q in combinations(pts, 2))


def bifurcation_scan(alpha, beta, c_values: Sequence[float], max_workers: int = 1) -> list[ScanRow]:
    """One row of equilibria per value of ``c``, in input order."""
    values = [float(c) for c in c_values]
    if not all(math.isfinite(c) for c in values):
        raise DomainError("c values must be finite")

    def row(c):
        return ScanRow(c, equilibria(alpha, beta, c))

    if max_workers > 1 and len(values) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers) as pool:
            return list(pool.map(row, values))
    return [row(c) for c in values]


def _reduced(x: Fraction) -> tuple[int, int]:
    return x.numerator, x.denominator


def _branch_ok(x: Fraction) -> bool:
    p, q = _reduced(x)
    return 0 < p < q and q % 2 == 1


def classify_branch(nu, alpha, single_term: bool = False, c: Optional[float] = None) -> RegularizabilityReport:
    """Branch/block regularizability from the exponents of the potential.

    With ``single_term`` the potential is ``|x|^-alpha`` and the test is on
    ``gamma = 2/(2 + alpha)``.  Otherwise both ``2/(2 + max)`` and
    ``min/(2 + max)`` of the two exponents must have odd reduced denominators.
    The extension is a reflection when the numerator of ``gamma`` is even.

    Passing ``c <= 0`` drops the ``|x|^-alpha`` term and classifies the
    Newtonian term ``|x|^-nu`` alone.
    """
    nu = as_fraction(nu, "nu") if nu is not None else None
    alpha = as_fraction(alpha, "alpha")
    if alpha <= 0 or (nu is not None and nu <= 0):
        raise DomainError("exponents must be positive")

    if c is not None and c <= 0 and not single_term:
        if nu is None:
            raise DomainError("nu is required when c <= 0")
        single_term, alpha = True, nu

    if single_term:
        gamma = Fraction(2) / (2 + alpha)
        branch = _branch_ok(gamma)
        second = (None, None)
    else:
        if nu is None:
            raise DomainError("two-term classification needs nu")
        hi, lo = max(nu, alpha), min(nu, alpha)
        gamma = Fraction(2) / (2 + hi)
        ratio = lo / (2 + hi)
        branch = _branch_ok(gamma) and _branch_ok(ratio)
        second = _reduced(ratio)
        alpha = hi

    p, q = _reduced(gamma)
    extension = "none" if not branch else ("reflection" if p % 2 == 0 else "transmission")
    beta = alpha / 2
    return RegularizabilityReport(
        gamma_p=p,
        gamma_q=q,
        second_ratio_p=second[0],
        second_ratio_q=second[1],
        branch=branch,
        extension=extension,
        block=classify_block(beta),
        beta=beta,
        mode="single-term" if single_term else "two-term",
    )


def classify_block(beta) -> bool:
    """True iff ``beta = 1 - 1/n`` for a positive integer ``n``."""
    beta = as_fraction(beta, "beta")
    if beta <= 0:
        raise DomainError("beta must be positive")
    if beta >= 1:
        return False
    n = 1 / (1 - beta)
    return n.denominator == 1 and n > 0


def on_collision_manifold(state, c: float, tol: float) -> bool:
    """True iff ``r <= tol`` and ``|v^2 + w^2 - 2c| <= tol``."""
    if not tol > 0:
        raise DomainError("tol must be positive")
    return state.r <= tol and abs(state.v**2 + state.w**2 - 2.0 * c) <= tol


def collision_distance(r: float, v: float, w: float, c: float) -> float:
    """Distance-like measure to the collision manifold used for verdicts."""
    return max(r, abs(v * v + w * w - 2.0 * c))
