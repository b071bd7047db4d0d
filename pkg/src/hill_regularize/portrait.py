"""Phase portraits of the reduced collision-manifold system, rendered as SVG."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .collision import equilibria, make_reduced_field
from .errors import StepSizeUnderflow
from .integrator import EventSpec, integrate
from .params import as_fraction

SIZE = 600
MARGIN = 40
KIND_COLORS = {
    "saddle": "#d62728",
    "source": "#ff7f0e",
    "sink": "#1f77b4",
    "center": "#2ca02c",
    "degenerate": "#7f7f7f",
}


@dataclass
class Portrait:
    alpha: object
    beta: object
    c: float
    half_width: float
    seeds: list
    curves: list
    equilibria: list


def default_half_width(c: float) -> float:
    """Viewport half-width: 3, scaled by sqrt(c) when ``c > 0``."""
    return 3.0 * math.sqrt(c) if c > 0 else 3.0


def portrait_seeds(c: float, half_width: float, grid: int) -> list[tuple[float, float]]:
    """Uniform grid plus seeds on the invariant circle and on ``w = 0``."""
    seeds = []
    if grid == 1:
        axis = [0.0]
    else:
        axis = [-half_width * 0.9 + 1.8 * half_width * i / (grid - 1) for i in range(grid)]
    seeds.extend((v, w) for w in axis for v in axis)
    if c > 0:
        rho = math.sqrt(2.0 * c)
        for k in range(8):
            phi = (k + 0.5) * math.pi / 4
            seeds.append((rho * math.cos(phi), rho * math.sin(phi)))
    for frac in (-0.8, -0.4, 0.4, 0.8):
        seeds.append((frac * half_width, 0.0))
    return seeds


def _flow_line(field, seed, tau, limit, rel_tol):
    leave = EventSpec(lambda t, y: max(abs(y[1]), abs(y[2])) - limit, "rising", True)
    pieces = []
    for t_end in (-tau, tau):
        try:
            traj = integrate(field, [0.0, seed[0], seed[1]], (0.0, t_end), rel_tol, 1e-9, events=[leave])
            ys = traj.y
        except StepSizeUnderflow as exc:
            ys = exc.trajectory.y
        pieces.append(ys[:, 1:])
    back, fwd = pieces
    return np.vstack([back[::-1], fwd[1:]])


def compute_portrait(alpha, beta, c: float, grid: int = 7, tau: float = 4.0,
                     rel_tol: float = 1e-7, max_workers: int = 1) -> Portrait:
    alpha = as_fraction(alpha, "alpha")
    beta = as_fraction(beta, "beta")
    half = default_half_width(c)
    seeds = portrait_seeds(c, half, grid)
    field = make_reduced_field(beta, alpha, c)
    limit = 1.5 * half

    def one(seed):
        return _flow_line(field, seed, tau, limit, rel_tol)

    if max_workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers) as pool:
            curves = list(pool.map(one, seeds))
    else:
        curves = [one(s) for s in seeds]
    return Portrait(alpha, beta, c, half, seeds, curves, equilibria(alpha, beta, c))


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def render_svg(portrait: Portrait) -> str:
    """Self-contained SVG; identical input gives identical bytes."""
    half = portrait.half_width
    scale = (SIZE - 2 * MARGIN) / (2 * half)

    def px(v, w):
        return MARGIN + (v + half) * scale, SIZE - MARGIN - (w + half) * scale

    meta = {
        "alpha": str(portrait.alpha),
        "beta": str(portrait.beta),
        "c": portrait.c,
        "v_range": [-half, half],
        "w_range": [-half, half],
        "axis_ranges": "presentation choice: [-3, 3] scaled by sqrt(c) for c > 0",
        "seeds": len(portrait.seeds),
    }
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f"<metadata>{escape(json.dumps(meta, sort_keys=True))}</metadata>",
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>',
        f'<clipPath id="plot"><rect x="{MARGIN}" y="{MARGIN}" '
        f'width="{SIZE - 2 * MARGIN}" height="{SIZE - 2 * MARGIN}"/></clipPath>',
    ]
    x0, y0 = px(-half, 0.0)
    x1, _ = px(half, 0.0)
    xa, ya = px(0.0, -half)
    _, yb = px(0.0, half)
    out.append(
        f'<line class="axis" x1="{_fmt(xa)}" y1="{_fmt(ya)}" x2="{_fmt(xa)}" y2="{_fmt(yb)}" '
        'stroke="#bbbbbb" stroke-width="1"/>'
    )
    out.append(
        f'<line class="invariant-line" data-w="0" x1="{_fmt(x0)}" y1="{_fmt(y0)}" '
        f'x2="{_fmt(x1)}" y2="{_fmt(y0)}" stroke="#555555" stroke-width="1.5"/>'
    )
    out.append('<g class="flow" clip-path="url(#plot)" fill="none" stroke="#9aa7b8" stroke-width="0.8">')
    for curve in portrait.curves:
        pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in (px(v, w) for v, w in curve))
        out.append(f'<polyline class="trajectory" points="{pts}"/>')
    out.append("</g>")
    if portrait.c > 0:
        cx, cy = px(0.0, 0.0)
        radius = math.sqrt(2.0 * portrait.c)
        out.append(
            f'<circle class="invariant-circle" data-radius-sq={quoteattr(repr(2.0 * portrait.c))} '
            f'cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(radius * scale)}" '
            'fill="none" stroke="#000000" stroke-width="1.5" stroke-dasharray="6,3"/>'
        )
    out.append('<g class="equilibria">')
    for eq in portrait.equilibria:
        v, w = eq.location
        ex, ey = px(v, w)
        out.append(
            f'<circle class="equilibrium" data-name={quoteattr(eq.name)} data-kind="{eq.kind}" '
            f'data-v={quoteattr(repr(v))} data-w={quoteattr(repr(w))} cx="{_fmt(ex)}" '
            f'cy="{_fmt(ey)}" r="5" fill="{KIND_COLORS[eq.kind]}"/>'
        )
        out.append(
            f'<text x="{_fmt(ex + 7)}" y="{_fmt(ey - 7)}" font-family="sans-serif" '
            f'font-size="12">{escape(eq.name)} ({eq.kind})</text>'
        )
    out.append("</g>")
    out.append(
        f'<text x="{SIZE / 2:.0f}" y="{SIZE - 10}" font-family="sans-serif" font-size="14" '
        f'text-anchor="middle">v</text>'
    )
    out.append(
        f'<text x="12" y="{SIZE / 2:.0f}" font-family="sans-serif" font-size="14">w</text>'
    )
    out.append(
        f'<text x="{SIZE / 2:.0f}" y="24" font-family="sans-serif" font-size="14" '
        f'text-anchor="middle">c = {escape(repr(portrait.c))}, alpha = {portrait.alpha}, '
        f"beta = {portrait.beta}</text>"
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def portrait_csv_rows(portrait: Portrait):
    """``(curve, index, v, w)`` rows of every flow line."""
    for k, curve in enumerate(portrait.curves):
        for i, (v, w) in enumerate(curve):
            yield k, i, float(v), float(w)
