"""Run configuration: JSON schema, validation and conversion to parameters."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import jsonschema

from .dynamics import hill_params_from_equilibrium
from .equilibrium import (
    OblateBody,
    TriangleConfig,
    lambdas,
    rescale_oblateness,
    solve_triangle,
    triangle_residuals,
)
from .errors import ConfigError
from .params import HillParams, as_fraction

SCHEMA_VERSION = 1

_number = {"type": "number"}
_positive = {"type": "number", "exclusiveMinimum": 0}
_rational = {
    "oneOf": [
        {"type": "integer"},
        {"type": "string", "pattern": r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$"},
    ]
}
_triple = lambda item: {"type": "array", "items": item, "minItems": 3, "maxItems": 3}  # noqa: E731

SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["schema"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "bodies": {
            "type": "object",
            "additionalProperties": False,
            "required": ["m1", "m2", "m3", "c20", "radius"],
            "properties": {
                "m1": _positive,
                "m2": _positive,
                "m3": _positive,
                "c20": _triple(_number),
                "radius": _triple(_positive),
            },
        },
        "direct": {
            "type": "object",
            "additionalProperties": False,
            "required": ["mu", "u1", "u2"],
            "properties": {
                "mu": {"type": "number", "minimum": 0, "maximum": 1},
                "u1": _positive,
                "u2": _positive,
                "lambda1": _number,
                "lambda2": _number,
                "c3": _number,
            },
        },
        "overrides": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "nu": _rational,
                "alpha": _rational,
                "c": _number,
                "A": _number,
                "B": _number,
                "mode": {"enum": ["standard", "newtonian-limit"]},
            },
        },
        "integrator": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "rel_tol": _positive,
                "abs_tol": _positive,
                "tau_max": _positive,
                "r_floor": _positive,
                "r_ceiling": _positive,
            },
        },
        "propagate": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "coords": {"enum": ["cartesian", "mcgehee"]},
                "state0": {"type": "array", "items": _number, "minItems": 4, "maxItems": 4},
                "span": {"type": "array", "items": _number, "minItems": 2, "maxItems": 2},
                "h": _number,
            },
        },
        "portrait": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "alpha": _rational,
                "beta": _rational,
                "c": _number,
                "grid": {"type": "integer", "minimum": 1},
                "tau": _positive,
            },
        },
        "scan": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "alpha": _rational,
                "beta": _rational,
                "c_min": _number,
                "c_max": _number,
                "steps": {"type": "integer", "minimum": 2},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "format": {"enum": ["json", "csv", "svg"]},
                "path": {"type": "string"},
            },
        },
    },
    "not": {"required": ["bodies", "direct"]},
}


@dataclass
class RunConfig:
    raw: dict = field(default_factory=lambda: {"schema": SCHEMA_VERSION})

    def section(self, name: str) -> dict:
        return dict(self.raw.get(name, {}))

    @property
    def has_system(self) -> bool:
        return "bodies" in self.raw or "direct" in self.raw


def validate(raw: dict) -> RunConfig:
    """Check ``raw`` against :data:`SCHEMA` plus the mass ordering."""
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {exc.message}") from None
    bodies = raw.get("bodies")
    if bodies and not bodies["m1"] > bodies["m2"] > bodies["m3"]:
        raise ConfigError("bodies: masses must satisfy m1 > m2 > m3")
    for key in ("nu", "alpha"):
        if key in raw.get("overrides", {}):
            if as_fraction(raw["overrides"][key], key) <= 0:
                raise ConfigError(f"overrides/{key}: must be positive")
    return RunConfig(raw)


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    return validate(raw)


@dataclass(frozen=True)
class System:
    """Resolved physical system: triangle, rescaled tertiary oblateness, params."""

    triangle: TriangleConfig
    c3: float
    residuals: Optional[tuple[float, float]]
    params: HillParams


def resolve_system(cfg: RunConfig) -> System:
    raw = cfg.raw
    residuals = None
    if "bodies" in raw:
        b = raw["bodies"]
        masses = (b["m1"], b["m2"], b["m3"])
        bodies = [OblateBody(m, R, c20) for m, R, c20 in zip(masses, b["radius"], b["c20"])]
        u1, u2 = solve_triangle(bodies[0].C, bodies[1].C, bodies[2].C)
        residuals = triangle_residuals(u1, u2, *(body.C for body in bodies))
        mu = b["m2"] / (b["m1"] + b["m2"])
        triangle = TriangleConfig.from_sides(mu, u1, u2)
        c3 = rescale_oblateness(b["c20"][2], b["radius"][2], b["m3"])
    elif "direct" in raw:
        d = raw["direct"]
        lam1, lam2, delta = lambdas(d["mu"], d["u1"], d["u2"])
        triangle = TriangleConfig(
            d["mu"], d["u1"], d["u2"], d.get("lambda1", lam1), d.get("lambda2", lam2), delta
        )
        c3 = d.get("c3", 0.0)
    else:
        raise ConfigError("config needs either 'bodies' or 'direct'")

    base = hill_params_from_equilibrium(triangle, c3)
    ov = cfg.section("overrides")
    params = HillParams(
        A=ov.get("A", base.A),
        B=ov.get("B", base.B),
        c=ov.get("c", base.c),
        nu=ov.get("nu", base.nu),
        alpha=ov.get("alpha", base.alpha),
        mode=ov.get("mode", "standard"),
    )
    return System(triangle, c3, residuals, params)


def params_from_overrides(cfg: RunConfig) -> HillParams:
    """Parameters when no physical system is given: Hill defaults plus overrides."""
    ov = cfg.section("overrides")
    return HillParams(
        A=ov.get("A", -1.0),
        B=ov.get("B", 0.5),
        c=ov.get("c", 0.0),
        nu=ov.get("nu", 1),
        alpha=ov.get("alpha", 3),
        mode=ov.get("mode", "standard"),
    )
