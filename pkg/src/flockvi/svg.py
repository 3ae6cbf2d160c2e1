"""Minimal standalone SVG plots: polyline series, axes, legend, markers.

Just enough vector graphics to reproduce the two plot types the
simulations call for: agent trajectories in the plane (with a cross at
each initial position) and energy-vs-time curves. No third-party
plotting dependency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


class EmptyPlotError(ValueError):
    """No series, or a series without points."""


@dataclass(frozen=True)
class PlotStyle:
    width: int = 720
    height: int = 480
    title: str = ""
    x_label: str = ""
    y_label: str = ""
    markers: bool = False  # cross at the first point of each series


def _nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / max(target - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * span:
        ticks.append(0.0 if abs(t) < 1e-12 * span else t)
        t += step
    return ticks


def _fmt_tick(x: float) -> str:
    return f"{x:g}"


def emit_svg(series, style: PlotStyle | None = None, sink=None) -> int:
    """Writes an SVG 1.1 document with one polyline per series.

    Args:
        series: sequence of (name, xs, ys) with equal-length point arrays.
        style: plot geometry and labels; defaults to PlotStyle().
        sink: path or text file object.

    Returns:
        Number of bytes written.

    Raises:
        EmptyPlotError: no series, or an empty series.
    """
    series = [(str(name), list(map(float, xs)), list(map(float, ys)))
              for name, xs, ys in series]
    if not series:
        raise EmptyPlotError("no series to plot")
    for name, xs, ys in series:
        if len(xs) == 0 or len(xs) != len(ys):
            raise EmptyPlotError(f"series {name!r} is empty or ragged")
    style = style or PlotStyle()

    xmin = min(min(xs) for _, xs, _ in series)
    xmax = max(max(xs) for _, xs, _ in series)
    ymin = min(min(ys) for _, _, ys in series)
    ymax = max(max(ys) for _, _, ys in series)
    if xmax == xmin:
        xmin, xmax = xmin - 1.0, xmax + 1.0
    if ymax == ymin:
        ymin, ymax = ymin - 1.0, ymax + 1.0
    xpad = 0.05 * (xmax - xmin)
    ypad = 0.05 * (ymax - ymin)
    xmin, xmax = xmin - xpad, xmax + xpad
    ymin, ymax = ymin - ypad, ymax + ypad

    left, right, top, bottom = 62, 16, 34, 46
    pw = style.width - left - right
    ph = style.height - top - bottom

    def sx(x: float) -> float:
        return left + (x - xmin) / (xmax - xmin) * pw

    def sy(y: float) -> float:
        return top + (ymax - y) / (ymax - ymin) * ph

    lines: list[str] = []
    lines.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{style.width}" height="{style.height}" '
        f'viewBox="0 0 {style.width} {style.height}">'
    )
    lines.append(f'<rect width="{style.width}" height="{style.height}" fill="white"/>')
    if style.title:
        lines.append(
            f'<text x="{style.width / 2:.1f}" y="20" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{style.title}</text>'
        )
    # frame
    lines.append(
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" '
        f'fill="none" stroke="#333" stroke-width="1"/>'
    )
    for t in _nice_ticks(xmin, xmax):
        px = sx(t)
        lines.append(
            f'<line x1="{px:.2f}" y1="{top + ph}" x2="{px:.2f}" '
            f'y2="{top + ph + 4}" stroke="#333"/>'
        )
        lines.append(
            f'<text x="{px:.2f}" y="{top + ph + 17}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_fmt_tick(t)}</text>'
        )
    for t in _nice_ticks(ymin, ymax):
        py = sy(t)
        lines.append(
            f'<line x1="{left - 4}" y1="{py:.2f}" x2="{left}" y2="{py:.2f}" stroke="#333"/>'
        )
        lines.append(
            f'<text x="{left - 7}" y="{py + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_fmt_tick(t)}</text>'
        )
    if style.x_label:
        lines.append(
            f'<text x="{left + pw / 2:.1f}" y="{style.height - 8}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{style.x_label}</text>'
        )
    if style.y_label:
        lines.append(
            f'<text x="14" y="{top + ph / 2:.1f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12" '
            f'transform="rotate(-90 14 {top + ph / 2:.1f})">{style.y_label}</text>'
        )

    for idx, (name, xs, ys) in enumerate(series):
        color = _PALETTE[idx % len(_PALETTE)]
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
        lines.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        if style.markers:
            mx, my = sx(xs[0]), sy(ys[0])
            lines.append(
                f'<path d="M {mx - 5:.2f} {my - 5:.2f} L {mx + 5:.2f} {my + 5:.2f} '
                f'M {mx - 5:.2f} {my + 5:.2f} L {mx + 5:.2f} {my - 5:.2f}" '
                f'stroke="{color}" stroke-width="1.5" class="marker"/>'
            )
        ly = top + 14 + 15 * idx
        lines.append(
            f'<line x1="{left + pw - 96}" y1="{ly - 4}" x2="{left + pw - 76}" '
            f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>'
        )
        lines.append(
            f'<text x="{left + pw - 70}" y="{ly}" font-family="sans-serif" '
            f'font-size="11">{name}</text>'
        )
    lines.append("</svg>")
    doc = "\n".join(lines) + "\n"

    if sink is None:
        raise ValueError("sink is required (path or file object)")
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8") as fh:
            fh.write(doc)
    else:
        sink.write(doc)
    return len(doc.encode("utf-8"))
