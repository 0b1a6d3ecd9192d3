"""Self-contained SVG line charts, one polyline per labelled series.

Plain text output, no rendering dependency, diffs cleanly.
"""

from __future__ import annotations

import math
from typing import Sequence

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd",
           "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"]

_WIDTH, _HEIGHT = 760, 420
_ML, _MR, _MT, _MB = 64, 160, 40, 52


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    magnitude = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * magnitude
        if raw <= step:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    value = first
    while value <= hi + step * 1e-9:
        ticks.append(round(value, 10))
        value += step
    return ticks


def _fmt(value: float) -> str:
    if value == int(value) and abs(value) < 1e9:
        return str(int(value))
    return f"{value:.4g}"


def line_chart(
    series: Sequence[tuple[str, Sequence[float], Sequence[float]]],
    title: str,
    x_label: str,
    y_label: str,
) -> str:
    """Render (label, xs, ys) series into an SVG document string."""
    if not series:
        raise ValueError("chart needs at least one series")
    all_x = [x for _, xs, _ in series for x in xs]
    all_y = [y for _, _, ys in series for y in ys]
    if not all_x:
        raise ValueError("chart series are empty")
    x_lo, x_hi = min(all_x), max(all_x)
    y_lo, y_hi = min(all_y), max(all_y)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    pad = (y_hi - y_lo) * 0.05 or max(abs(y_hi), 1.0) * 0.05
    y_lo, y_hi = y_lo - pad, y_hi + pad

    plot_w = _WIDTH - _ML - _MR
    plot_h = _HEIGHT - _MT - _MB

    def px(x: float) -> float:
        return _ML + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return _MT + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    svg = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_WIDTH} {_HEIGHT}" '
        'font-family="sans-serif">',
        f'  <rect width="{_WIDTH}" height="{_HEIGHT}" fill="#ffffff"/>',
        f'  <text x="{_WIDTH / 2:.1f}" y="24" text-anchor="middle" font-size="16" '
        f'fill="#222">{title}</text>',
    ]
    for tick in _nice_ticks(y_lo, y_hi):
        y = py(tick)
        svg.append(f'  <line x1="{_ML}" y1="{y:.1f}" x2="{_ML + plot_w}" y2="{y:.1f}" '
                   'stroke="#e0e0e0" stroke-width="1"/>')
        svg.append(f'  <text x="{_ML - 8}" y="{y + 4:.1f}" text-anchor="end" '
                   f'font-size="11" fill="#555">{_fmt(tick)}</text>')
    for tick in _nice_ticks(x_lo, x_hi, 8):
        x = px(tick)
        svg.append(f'  <text x="{x:.1f}" y="{_MT + plot_h + 18}" text-anchor="middle" '
                   f'font-size="11" fill="#555">{_fmt(tick)}</text>')
    for i, (label, xs, ys) in enumerate(series):
        colour = PALETTE[i % len(PALETTE)]
        points = " ".join(f"{px(x):.1f},{py(y):.1f}" for x, y in zip(xs, ys))
        svg.append(f'  <polyline fill="none" stroke="{colour}" stroke-width="1.8" '
                   f'points="{points}"/>')
        ly = _MT + 12 + i * 18
        svg.append(f'  <rect x="{_ML + plot_w + 12}" y="{ly - 9}" width="12" height="12" '
                   f'fill="{colour}"/>')
        svg.append(f'  <text x="{_ML + plot_w + 30}" y="{ly + 1}" font-size="12" '
                   f'fill="#222">{label}</text>')
    svg.append(f'  <line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_MT + plot_h}" '
               'stroke="#333" stroke-width="1"/>')
    svg.append(f'  <line x1="{_ML}" y1="{_MT + plot_h}" x2="{_ML + plot_w}" '
               f'y2="{_MT + plot_h}" stroke="#333" stroke-width="1"/>')
    svg.append(f'  <text x="{_ML + plot_w / 2:.1f}" y="{_HEIGHT - 14}" text-anchor="middle" '
               f'font-size="12" fill="#555">{x_label}</text>')
    svg.append(f'  <text x="18" y="{_MT + plot_h / 2:.1f}" text-anchor="middle" '
               f'font-size="12" fill="#555" '
               f'transform="rotate(-90, 18, {_MT + plot_h / 2:.1f})">{y_label}</text>')
    svg.append("</svg>")
    return "\n".join(svg) + "\n"
