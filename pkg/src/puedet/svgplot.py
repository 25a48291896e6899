"""Minimal deterministic SVG 1.1 line charts: axes, one polyline per series,
and a legend.  No external plotting dependency, so byte-identical output for
identical data."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .errors import InvalidInputError

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")

_W, _H = 640, 480
_ML, _MR, _MT, _MB = 70, 24, 40, 56


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def line_chart(
    series: list[tuple[str, list[float], list[float]]],
    title: str,
    xlabel: str,
    ylabel: str,
) -> str:
    """Render (label, xs, ys) series to an SVG document string."""
    if not series:
        raise InvalidInputError("need at least one series")
    for label, xs, ys in series:
        if len(xs) != len(ys) or not xs:
            raise InvalidInputError(f"series {label!r} needs equal-length non-empty x/y")
        if not all(math.isfinite(v) for v in list(xs) + list(ys)):
            raise InvalidInputError(f"series {label!r} contains non-finite values")

    all_x = [v for _, xs, _ in series for v in xs]
    all_y = [v for _, _, ys in series for v in ys]
    x_lo, x_hi = min(all_x), max(all_x)
    y_lo, y_hi = min(all_y), max(all_y)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1.0, x_hi + 1.0
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    plot_w = _W - _ML - _MR
    plot_h = _H - _MT - _MB

    def sx(v: float) -> float:
        return _ML + (v - x_lo) / (x_hi - x_lo) * plot_w

    def sy(v: float) -> float:
        return _MT + (y_hi - v) / (y_hi - y_lo) * plot_h

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.1f}" y="22" font-family="sans-serif" font-size="15" '
        f'text-anchor="middle">{escape(title)}</text>',
    ]

    axis_style = 'stroke="black" stroke-width="1"'
    out.append(f'<line x1="{_ML}" y1="{_MT + plot_h}" x2="{_ML + plot_w}" y2="{_MT + plot_h}" {axis_style}/>')
    out.append(f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_MT + plot_h}" {axis_style}/>')

    for tx in _ticks(x_lo, x_hi):
        px = sx(tx)
        out.append(f'<line x1="{_fmt(px)}" y1="{_MT + plot_h}" x2="{_fmt(px)}" y2="{_MT + plot_h + 5}" {axis_style}/>')
        out.append(
            f'<text x="{_fmt(px)}" y="{_MT + plot_h + 20}" font-family="sans-serif" '
            f'font-size="11" text-anchor="middle">{tx:.4g}</text>'
        )
    for ty in _ticks(y_lo, y_hi):
        py = sy(ty)
        out.append(f'<line x1="{_ML - 5}" y1="{_fmt(py)}" x2="{_ML}" y2="{_fmt(py)}" {axis_style}/>')
        out.append(
            f'<text x="{_ML - 9}" y="{_fmt(py + 4)}" font-family="sans-serif" '
            f'font-size="11" text-anchor="end">{ty:.4g}</text>'
        )

    out.append(
        f'<text x="{_ML + plot_w / 2:.1f}" y="{_H - 14}" font-family="sans-serif" '
        f'font-size="13" text-anchor="middle">{escape(xlabel)}</text>'
    )
    out.append(
        f'<text x="18" y="{_MT + plot_h / 2:.1f}" font-family="sans-serif" font-size="13" '
        f'text-anchor="middle" transform="rotate(-90 18 {_MT + plot_h / 2:.1f})">{escape(ylabel)}</text>'
    )

    for i, (label, xs, ys) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        points = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in zip(xs, ys))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>')

    lx, ly = _ML + plot_w - 170, _MT + 10
    out.append(
        f'<rect x="{lx - 8}" y="{ly - 14}" width="178" height="{18 * len(series) + 8}" '
        f'fill="white" stroke="#999999" stroke-width="0.5"/>'
    )
    for i, (label, _, _) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        y = ly + 18 * i
        out.append(f'<line x1="{lx}" y1="{y - 4}" x2="{lx + 26}" y2="{y - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(
            f'<text x="{lx + 32}" y="{y}" font-family="sans-serif" font-size="11">{escape(label)}</text>'
        )

    out.append("</svg>")
    return "\n".join(out) + "\n"
