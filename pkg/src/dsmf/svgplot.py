"""Minimal static SVG band plots (no plotting dependency).

One plot shows the estimation-error band of a sensor along one state
dimension: the shaded region between err_lower and err_upper against the
step index, with a dashed zero line. Output is deterministic text.
"""

from __future__ import annotations

import numpy as np

_WIDTH = 640
_HEIGHT = 240
_MARGIN_L = 56
_MARGIN_R = 12
_MARGIN_T = 28
_MARGIN_B = 32


def _fmt(value: float) -> str:
    return format(float(value), ".6g")


def error_band_svg(steps, err_lower, err_upper, title: str) -> str:
    steps = np.asarray(steps, dtype=float)
    lo = np.asarray(err_lower, dtype=float)
    hi = np.asarray(err_upper, dtype=float)
    if not (steps.shape == lo.shape == hi.shape) or steps.size == 0:
        raise ValueError("steps and bands must be equal-length, non-empty")
    x0, x1 = float(steps[0]), float(steps[-1])
    y0 = float(min(lo.min(), 0.0))
    y1 = float(max(hi.max(), 0.0))
    if x1 <= x0:
        x1 = x0 + 1.0
    if y1 <= y0:
        y1 = y0 + 1.0
    pad = 0.05 * (y1 - y0)
    y0 -= pad
    y1 += pad
    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def px(x: float) -> str:
        return _fmt(_MARGIN_L + (x - x0) / (x1 - x0) * plot_w)

    def py(y: float) -> str:
        return _fmt(_MARGIN_T + (y1 - y) / (y1 - y0) * plot_h)

    band = " ".join(
        f"{px(k)},{py(v)}" for k, v in zip(steps, hi)
    ) + " " + " ".join(
        f"{px(k)},{py(v)}" for k, v in zip(steps[::-1], lo[::-1])
    )
    zero_y = py(0.0)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_MARGIN_L}" y="18" font-family="sans-serif" '
        f'font-size="13">{title}</text>',
        f'<polygon points="{band}" fill="#7db3d8" fill-opacity="0.55" '
        f'stroke="#2c6e9e" stroke-width="1"/>',
        f'<line x1="{px(x0)}" y1="{zero_y}" x2="{px(x1)}" y2="{zero_y}" '
        f'stroke="#444" stroke-width="1" stroke-dasharray="4,3"/>',
        f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T}" x2="{_MARGIN_L}" '
        f'y2="{_HEIGHT - _MARGIN_B}" stroke="#000" stroke-width="1"/>',
        f'<line x1="{_MARGIN_L}" y1="{_HEIGHT - _MARGIN_B}" '
        f'x2="{_WIDTH - _MARGIN_R}" y2="{_HEIGHT - _MARGIN_B}" '
        f'stroke="#000" stroke-width="1"/>',
        f'<text x="{_MARGIN_L}" y="{_HEIGHT - 10}" '
        f'font-family="sans-serif" font-size="11">k={_fmt(x0)}</text>',
        f'<text x="{_WIDTH - _MARGIN_R}" y="{_HEIGHT - 10}" '
        f'font-family="sans-serif" font-size="11" '
        f'text-anchor="end">k={_fmt(x1)}</text>',
        f'<text x="4" y="{py(y1 - pad)}" font-family="sans-serif" '
        f'font-size="11">{_fmt(y1 - pad)}</text>',
        f'<text x="4" y="{py(y0 + pad)}" font-family="sans-serif" '
        f'font-size="11">{_fmt(y0 + pad)}</text>',
        "</svg>",
    ]
    return "\n".join(parts) + "\n"
