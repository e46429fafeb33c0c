"""Minimal SVG line chart for coverage curves: one polyline per report,
points joined by straight segments (no smoothing)."""

from __future__ import annotations

from typing import Sequence

from dispersion.errors import InputError

_PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
    "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f",
)

_WIDTH, _HEIGHT = 640, 400
_LEFT, _RIGHT, _TOP, _BOTTOM = 56, 170, 24, 48


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def curve_svg(named_curves: list[tuple[str, Sequence[float]]]) -> str:
    """Render (name, cov_k values) series as an SVG document string."""
    if not named_curves:
        raise InputError("no curves to plot")
    for name, curve in named_curves:
        if not curve:
            raise InputError(f"curve {name!r} is empty")
    k_max = max(len(curve) for _, curve in named_curves)
    plot_w = _WIDTH - _LEFT - _RIGHT
    plot_h = _HEIGHT - _TOP - _BOTTOM

    def x_at(k: int) -> float:  # k is 1-based
        if k_max == 1:
            return _LEFT + plot_w / 2
        return _LEFT + (k - 1) * plot_w / (k_max - 1)

    def y_at(cov: float) -> float:
        return _TOP + (1.0 - cov) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<line x1="{_LEFT}" y1="{_TOP + plot_h}" x2="{_LEFT + plot_w}" '
        f'y2="{_TOP + plot_h}" stroke="black"/>',
        f'<line x1="{_LEFT}" y1="{_TOP}" x2="{_LEFT}" y2="{_TOP + plot_h}" '
        f'stroke="black"/>',
    ]
    tick_step = max(1, (k_max - 1) // 10 or 1)
    for k in range(1, k_max + 1):
        if (k - 1) % tick_step and k != k_max:
            continue
        x = _fmt(x_at(k))
        parts.append(
            f'<line x1="{x}" y1="{_TOP + plot_h}" x2="{x}" '
            f'y2="{_TOP + plot_h + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{x}" y="{_TOP + plot_h + 20}" font-size="12" '
            f'text-anchor="middle">{k}</text>'
        )
    for tick in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = _fmt(y_at(tick))
        parts.append(
            f'<line x1="{_LEFT - 5}" y1="{y}" x2="{_LEFT}" y2="{y}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{_LEFT - 9}" y="{y}" font-size="12" text-anchor="end" '
            f'dominant-baseline="middle">{tick:g}</text>'
        )
    parts.append(
        f'<text x="{_LEFT + plot_w / 2:.0f}" y="{_HEIGHT - 8}" font-size="13" '
        f'text-anchor="middle">k</text>'
    )
    parts.append(
        f'<text x="16" y="{_TOP + plot_h / 2:.0f}" font-size="13" '
        f'text-anchor="middle" transform="rotate(-90 16 {_TOP + plot_h / 2:.0f})">'
        f'cov_k</text>'
    )
    for i, (name, curve) in enumerate(named_curves):
        color = _PALETTE[i % len(_PALETTE)]
        points = " ".join(
            f"{_fmt(x_at(k))},{_fmt(y_at(cov))}"
            for k, cov in enumerate(curve, start=1)
        )
        parts.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" '
            f'stroke-width="2"/>'
        )
        ly = _TOP + 10 + 18 * i
        lx = _LEFT + plot_w + 12
        parts.append(
            f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{lx + 28}" y="{ly}" font-size="12" '
            f'dominant-baseline="middle">{_escape(name)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )
