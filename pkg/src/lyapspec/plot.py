"""Minimal hand-written SVG plots of pressure curves and spectra.

Coordinates are printed with fixed precision so equal input gives equal bytes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .io import write_output

W, H = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 40, 50
TICKS = 5
EXIT_EMPTY = 3


@dataclass(frozen=True)
class Series:
    x: Sequence[float]
    y: Sequence[float]
    label: str = ""
    dashed: bool = False
    colour: str = "#1f4e9c"


class EmptyPlotError(ValueError):
    pass


def _segments(x, y):
    """Split at non-finite points into runs of at least one point."""
    runs, cur = [], []
    for a, b in zip(x, y):
        if math.isfinite(a) and math.isfinite(b):
            cur.append((a, b))
        elif cur:
            runs.append(cur)
            cur = []
    if cur:
        runs.append(cur)
    return runs


def _span(vals):
    lo, hi = min(vals), max(vals)
    if hi - lo < 1e-12 * max(1.0, abs(lo)):
        pad = 0.5 * max(1.0, abs(lo)) if lo == 0 else 0.1 * abs(lo)
        return lo - pad, hi + pad
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _f(v):
    return f"{v:.2f}"


def svg_plot(series: List[Series], title="", xlabel="", ylabel="", hlines=()) -> str:
    """SVG text for the given series; raises EmptyPlotError when nothing is finite."""
    runs = [(s, _segments(list(map(float, s.x)), list(map(float, s.y)))) for s in series]
    pts = [p for _, rs in runs for r in rs for p in r]
    if not pts:
        raise EmptyPlotError("no finite data to plot")
    x0, x1 = _span([p[0] for p in pts])
    y0, y1 = _span([p[1] for p in pts] + [float(h) for h in hlines])
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM

    def sx(x):
        return LEFT + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return TOP + (y1 - y) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W // 2}" y="22" text-anchor="middle" font-family="sans-serif" font-size="15">{escape(title)}</text>',
        f'<line x1="{LEFT}" y1="{TOP + ph}" x2="{LEFT + pw}" y2="{TOP + ph}" stroke="black"/>',
        f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + ph}" stroke="black"/>',
    ]
    for k in range(TICKS + 1):
        xv = x0 + (x1 - x0) * k / TICKS
        yv = y0 + (y1 - y0) * k / TICKS
        X, Y = sx(xv), sy(yv)
        out.append(f'<line x1="{_f(X)}" y1="{TOP + ph}" x2="{_f(X)}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{_f(X)}" y="{TOP + ph + 18}" text-anchor="middle" font-family="sans-serif" '
                   f'font-size="11">{xv:.3g}</text>')
        out.append(f'<line x1="{LEFT - 5}" y1="{_f(Y)}" x2="{LEFT}" y2="{_f(Y)}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8}" y="{_f(Y + 4)}" text-anchor="end" font-family="sans-serif" '
                   f'font-size="11">{yv:.3g}</text>')
    out.append(f'<text x="{LEFT + pw // 2}" y="{H - 10}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="13">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{TOP + ph // 2}" text-anchor="middle" font-family="sans-serif" font-size="13" '
               f'transform="rotate(-90 16 {TOP + ph // 2})">{escape(ylabel)}</text>')
    for h in hlines:
        Y = sy(float(h))
        out.append(f'<line x1="{LEFT}" y1="{_f(Y)}" x2="{LEFT + pw}" y2="{_f(Y)}" stroke="#999999" '
                   f'stroke-dasharray="2,3"/>')
    legend_y = TOP + 14
    for s, rs in runs:
        dash = ' stroke-dasharray="6,4"' if s.dashed else ""
        for r in rs:
            if len(r) == 1:
                X, Y = sx(r[0][0]), sy(r[0][1])
                out.append(f'<circle cx="{_f(X)}" cy="{_f(Y)}" r="2" fill="{s.colour}"/>')
                continue
            coords = " ".join(f"{_f(sx(a))},{_f(sy(b))}" for a, b in r)
            out.append(f'<polyline points="{coords}" fill="none" stroke="{s.colour}" stroke-width="1.5"{dash}/>')
        if s.label:
            out.append(f'<line x1="{LEFT + pw - 150}" y1="{legend_y}" x2="{LEFT + pw - 125}" y2="{legend_y}" '
                       f'stroke="{s.colour}" stroke-width="1.5"{dash}/>')
            out.append(f'<text x="{LEFT + pw - 120}" y="{legend_y + 4}" font-family="sans-serif" '
                       f'font-size="11">{escape(s.label)}</text>')
            legend_y += 16
    out.append("</svg>")
    return "\n".join(out) + "\n"


def pressure_svg(curve) -> str:
    """Working curve with its certified bracket."""
    t = np.asarray(curve.t, dtype=float)
    name = curve.map.name
    return svg_plot(
        [
            Series(t, curve.p_lower, "lower bound", dashed=True, colour="#999999"),
            Series(t, curve.p_upper, "upper bound", dashed=True, colour="#999999"),
            Series(t, curve.p_mid, "P(t)"),
        ],
        title=f"pressure of {name} ({curve.kind.value}, {curve.ctype.value})",
        xlabel="t", ylabel="P(t)", hlines=(0.0,),
    )


def spectrum_svg(points, title="Lyapunov spectrum") -> str:
    """L(alpha); the discontinuous-boundary range t_inf + lim P / alpha is dashed."""
    a = [p.alpha for p in points]
    dashed = "boundary_discontinuous"
    solid_y = [p.L if p.case != dashed else math.nan for p in points]
    dash_y = [p.L if p.case == dashed else math.nan for p in points]
    # join the two pieces where the case changes
    for i in range(1, len(points)):
        if points[i].case == dashed and points[i - 1].case != dashed and math.isfinite(points[i - 1].L):
            dash_y[i - 1] = points[i - 1].L
    series = [Series(a, solid_y, "L(alpha)")]
    if any(math.isfinite(v) for v in dash_y):
        series.append(Series(a, dash_y, "t_inf + lim P / alpha", dashed=True, colour="#b03a2e"))
    return svg_plot(series, title=title, xlabel="alpha", ylabel="L(alpha)")


def emit_plot(data, path) -> int:
    """Write a pressure curve or a list of spectrum points as SVG; 3 on empty data."""
    try:
        if isinstance(data, (list, tuple)):
            if not data:
                raise EmptyPlotError("no spectrum points")
            text = spectrum_svg(data)
        else:
            text = pressure_svg(data)
    except EmptyPlotError:
        return EXIT_EMPTY
    write_output(path, text)
    return 0
