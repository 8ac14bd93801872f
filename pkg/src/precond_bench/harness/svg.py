"""Minimal SVG line plots of performance profiles (axes, log2 ticks, polylines, legend)."""

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union
from xml.sax.saxutils import escape

import numpy as np

from precond_bench.analysis.profiles import LOG2_MAX, LOG2_MIN, PerformanceProfile

WIDTH = 720
HEIGHT = 440
MARGIN_LEFT = 60
MARGIN_RIGHT = 220
MARGIN_TOP = 40
MARGIN_BOTTOM = 50

PALETTE = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
    "#bcbd22",
    "#17becf",
)


@dataclass(frozen=True)
class _Frame:
    x0: float = MARGIN_LEFT
    x1: float = WIDTH - MARGIN_RIGHT
    y0: float = HEIGHT - MARGIN_BOTTOM
    y1: float = MARGIN_TOP

    def px(self, log2_x: float) -> float:
        return self.x0 + (log2_x - LOG2_MIN) / (LOG2_MAX - LOG2_MIN) * (self.x1 - self.x0)

    def py(self, y: float) -> float:
        return self.y0 - y * (self.y0 - self.y1)


def _tick_label(k: int) -> str:
    return f"1/{2 ** -k}" if k < 0 else str(2**k)


def render_profiles(profiles: Sequence[PerformanceProfile], title: str = "") -> str:
    frame = _Frame()
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        parts.append(f'<text x="{WIDTH / 2:.1f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>')

    for k in range(int(LOG2_MIN), int(LOG2_MAX) + 1):
        x = frame.px(k)
        parts.append(f'<line x1="{x:.1f}" y1="{frame.y0:.1f}" x2="{x:.1f}" y2="{frame.y1:.1f}" stroke="#e0e0e0"/>')
        parts.append(f'<text x="{x:.1f}" y="{frame.y0 + 15:.1f}" text-anchor="middle">{_tick_label(k)}</text>')
    for y_tick in np.linspace(0.0, 1.0, 5):
        y = frame.py(float(y_tick))
        parts.append(f'<line x1="{frame.x0:.1f}" y1="{y:.1f}" x2="{frame.x1:.1f}" y2="{y:.1f}" stroke="#e0e0e0"/>')
        parts.append(f'<text x="{frame.x0 - 6:.1f}" y="{y + 4:.1f}" text-anchor="end">{y_tick:.2f}</text>')
    parts.append(
        f'<rect x="{frame.x0:.1f}" y="{frame.y1:.1f}" width="{frame.x1 - frame.x0:.1f}" '
        f'height="{frame.y0 - frame.y1:.1f}" fill="none" stroke="black"/>'
    )
    parts.append(
        f'<text x="{(frame.x0 + frame.x1) / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle">work reduction factor</text>'
    )
    parts.append(
        f'<text x="16" y="{(frame.y0 + frame.y1) / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {(frame.y0 + frame.y1) / 2:.1f})">fraction of problems</text>'
    )

    for i, profile in enumerate(profiles):
        color = PALETTE[i % len(PALETTE)]
        points = " ".join(f"{frame.px(float(lx)):.2f},{frame.py(float(y)):.2f}" for lx, y in zip(profile.log2_x, profile.y))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>')
        legend_y = MARGIN_TOP + 14 * i
        legend_x = WIDTH - MARGIN_RIGHT + 12
        parts.append(
            f'<line x1="{legend_x}" y1="{legend_y}" x2="{legend_x + 18}" y2="{legend_y}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(f'<text x="{legend_x + 24}" y="{legend_y + 4}">{escape(profile.label)}</text>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_profiles_svg(profiles: Sequence[PerformanceProfile], path: Union[str, Path], title: str = "") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_profiles(profiles, title), encoding="utf-8")
    return path


__all__ = ["render_profiles", "write_profiles_svg"]
