"""Minimal deterministic SVG scatter plots.

Plots are assembled as plain strings with fixed number formatting and no
timestamps or generated ids, so the same data always produces byte-identical
files.  That keeps report outputs diffable and lets end-to-end tests compare
runs directly.
"""

from __future__ import annotations

from typing import Sequence

WIDTH = 640
HEIGHT = 480
MARGIN_LEFT = 70
MARGIN_RIGHT = 20
MARGIN_TOP = 40
MARGIN_BOTTOM = 55
N_TICKS = 5


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _tick_label(value: float) -> str:
    return f"{value:.4g}"


def _scale(value: float, lo: float, hi: float, out_lo: float, out_hi: float) -> float:
    if hi == lo:
        return (out_lo + out_hi) / 2.0
    return out_lo + (value - lo) / (hi - lo) * (out_hi - out_lo)


def scatter_svg(
    points: Sequence[tuple[float, float]],
    xlabel: str,
    ylabel: str,
    title: str = "",
    labels: Sequence[str] | None = None,
) -> str:
    """Scatter plot of (x, y) points as an SVG document string.

    One ``<circle class="point">`` element is emitted per point; optional
    per-point labels are drawn next to the markers.
    """
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    x_lo, x_hi = (min(xs), max(xs)) if xs else (0.0, 1.0)
    y_lo, y_hi = (min(ys), max(ys)) if ys else (0.0, 1.0)
    x_pad = (x_hi - x_lo) * 0.05 or 0.5
    y_pad = (y_hi - y_lo) * 0.05 or 0.5
    x_lo, x_hi = x_lo - x_pad, x_hi + x_pad
    y_lo, y_hi = y_lo - y_pad, y_hi + y_pad

    plot_left = MARGIN_LEFT
    plot_right = WIDTH - MARGIN_RIGHT
    plot_top = MARGIN_TOP
    plot_bottom = HEIGHT - MARGIN_BOTTOM

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{plot_left}" y1="{plot_bottom}" x2="{plot_right}" y2="{plot_bottom}" '
        f'stroke="black" stroke-width="1"/>',
        f'<line x1="{plot_left}" y1="{plot_top}" x2="{plot_left}" y2="{plot_bottom}" '
        f'stroke="black" stroke-width="1"/>',
    ]

    for i in range(N_TICKS):
        frac = i / (N_TICKS - 1)
        x_value = x_lo + frac * (x_hi - x_lo)
        y_value = y_lo + frac * (y_hi - y_lo)
        x_pos = _scale(x_value, x_lo, x_hi, plot_left, plot_right)
        y_pos = _scale(y_value, y_lo, y_hi, plot_bottom, plot_top)
        parts.append(
            f'<line x1="{_fmt(x_pos)}" y1="{plot_bottom}" x2="{_fmt(x_pos)}" '
            f'y2="{plot_bottom + 5}" stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(x_pos)}" y="{plot_bottom + 18}" font-size="11" '
            f'text-anchor="middle" font-family="sans-serif">{_tick_label(x_value)}</text>'
        )
        parts.append(
            f'<line x1="{plot_left - 5}" y1="{_fmt(y_pos)}" x2="{plot_left}" '
            f'y2="{_fmt(y_pos)}" stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{plot_left - 8}" y="{_fmt(y_pos + 4)}" font-size="11" '
            f'text-anchor="end" font-family="sans-serif">{_tick_label(y_value)}</text>'
        )

    if title:
        parts.append(
            f'<text x="{WIDTH // 2}" y="{MARGIN_TOP - 15}" font-size="14" '
            f'text-anchor="middle" font-family="sans-serif">{_escape(title)}</text>'
        )
    parts.append(
        f'<text x="{(plot_left + plot_right) // 2}" y="{HEIGHT - 12}" font-size="13" '
        f'text-anchor="middle" font-family="sans-serif">{_escape(xlabel)}</text>'
    )
    parts.append(
        f'<text x="18" y="{(plot_top + plot_bottom) // 2}" font-size="13" '
        f'text-anchor="middle" font-family="sans-serif" '
        f'transform="rotate(-90 18 {(plot_top + plot_bottom) // 2})">{_escape(ylabel)}</text>'
    )

    for i, (x, y) in enumerate(points):
        x_pos = _scale(x, x_lo, x_hi, plot_left, plot_right)
        y_pos = _scale(y, y_lo, y_hi, plot_bottom, plot_top)
        parts.append(
            f'<circle class="point" cx="{_fmt(x_pos)}" cy="{_fmt(y_pos)}" r="4" '
            f'fill="steelblue" stroke="black" stroke-width="0.5"/>'
        )
        if labels is not None:
            parts.append(
                f'<text x="{_fmt(x_pos + 6)}" y="{_fmt(y_pos - 6)}" font-size="10" '
                f'font-family="sans-serif">{_escape(labels[i])}</text>'
            )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
