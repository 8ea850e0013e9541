"""Self-contained SVG emitter for FPPI/miss-rate curves.

The output is plain hand-assembled SVG so reruns are byte identical (no
renderer metadata, no timestamps). The companion CSV export is the
machine-readable artifact; this is the human-facing one, drawn in the
usual log-log presentation with an "MR-2 (MR-4)" legend per curve.
"""

from __future__ import annotations

import math

from .errors import PedbenchError
from .evaluation import (Curve, MR2_RANGE, MR4_RANGE, log_average_miss_rate)

PALETTE = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#e377c2", "#17becf"]

WIDTH, HEIGHT = 760, 520
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 20, 50
MISS_FLOOR = 1e-3  # lower bound of the y axis


def emit_plot(curves: list[Curve], labels: list[str], path,
              fppi_range: tuple[float, float] = MR4_RANGE) -> None:
    """Write a log-log miss-rate plot for one or more curves as SVG."""
    if not curves:
        raise PedbenchError("emit_plot needs at least one curve")
    if len(labels) != len(curves):
        raise PedbenchError("one label per curve required")
    svg = render_svg(curves, labels, fppi_range)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg)


def _x_pos(fppi: float, lo: float, hi: float) -> float:
    llo, lhi = math.log10(lo), math.log10(hi)
    f = (math.log10(max(fppi, lo)) - llo) / (lhi - llo)
    return MARGIN_L + f * (WIDTH - MARGIN_L - MARGIN_R)


def _y_pos(miss: float) -> float:
    lv = math.log10(min(max(miss, MISS_FLOOR), 1.0))
    lo, hi = math.log10(MISS_FLOOR), 0.0
    f = (lv - lo) / (hi - lo)
    return HEIGHT - MARGIN_B - f * (HEIGHT - MARGIN_T - MARGIN_B)


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _polyline(curve: Curve, lo: float, hi: float) -> str:
    """Step polyline in plot coordinates, clamped to the FPPI window."""
    pts: list[tuple[float, float]] = []
    last = None
    for p in curve.points:
        x = _x_pos(p.fppi, lo, hi)
        y = _y_pos(p.miss_rate)
        if last is not None and y != last[1]:
            pts.append((x, last[1]))  # horizontal step to the new fppi
        if not pts or (x, y) != pts[-1]:
            pts.append((x, y))
        last = (x, y)
    if last is not None and last[0] < WIDTH - MARGIN_R:
        pts.append((WIDTH - MARGIN_R, last[1]))
    return " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)


def render_svg(curves: list[Curve], labels: list[str],
               fppi_range: tuple[float, float]) -> str:
    lo, hi = fppi_range
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    # axes grid: decades on both axes
    x_dec = range(int(math.ceil(math.log10(lo))), int(math.floor(math.log10(hi))) + 1)
    for d in x_dec:
        x = _x_pos(10.0 ** d, lo, hi)
        out.append(f'<line x1="{_fmt(x)}" y1="{MARGIN_T}" x2="{_fmt(x)}" '
                   f'y2="{HEIGHT - MARGIN_B}" stroke="#dddddd"/>')
        out.append(f'<text x="{_fmt(x)}" y="{HEIGHT - MARGIN_B + 18}" '
                   f'font-size="12" text-anchor="middle">1e{d}</text>')
    y_dec = range(int(math.log10(MISS_FLOOR)), 1)
    for d in y_dec:
        y = _y_pos(10.0 ** d)
        out.append(f'<line x1="{MARGIN_L}" y1="{_fmt(y)}" '
                   f'x2="{WIDTH - MARGIN_R}" y2="{_fmt(y)}" stroke="#dddddd"/>')
        out.append(f'<text x="{MARGIN_L - 8}" y="{_fmt(y + 4)}" font-size="12" '
                   f'text-anchor="end">1e{d}</text>')
    out.append(f'<rect x="{MARGIN_L}" y="{MARGIN_T}" '
               f'width="{WIDTH - MARGIN_L - MARGIN_R}" '
               f'height="{HEIGHT - MARGIN_T - MARGIN_B}" fill="none" stroke="black"/>')
    out.append(f'<text x="{(MARGIN_L + WIDTH - MARGIN_R) / 2:.0f}" '
               f'y="{HEIGHT - 10}" font-size="13" text-anchor="middle">'
               f'false positives per image</text>')
    out.append(f'<text x="16" y="{(MARGIN_T + HEIGHT - MARGIN_B) / 2:.0f}" '
               f'font-size="13" text-anchor="middle" '
               f'transform="rotate(-90 16 {(MARGIN_T + HEIGHT - MARGIN_B) / 2:.0f})">'
               f'miss rate</text>')

    for k, (curve, label) in enumerate(zip(curves, labels)):
        color = PALETTE[k % len(PALETTE)]
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.8" '
                   f'points="{_polyline(curve, lo, hi)}"/>')
        mr2 = log_average_miss_rate(curve, *MR2_RANGE)
        mr4 = log_average_miss_rate(curve, *MR4_RANGE)
        ly = MARGIN_T + 18 + 18 * k
        out.append(f'<line x1="{MARGIN_L + 10}" y1="{ly - 4}" '
                   f'x2="{MARGIN_L + 34}" y2="{ly - 4}" stroke="{color}" '
                   f'stroke-width="1.8"/>')
        out.append(f'<text x="{MARGIN_L + 40}" y="{ly}" font-size="12">'
                   f'{_escape(label)} {mr2 * 100:.1f}% ({mr4 * 100:.1f}%)</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;"))
