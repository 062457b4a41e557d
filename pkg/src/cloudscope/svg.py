"""Standalone SVG charts: log-log radial spectra and CLI box plots.

Both charts share one plot area, ``[LEFT, LEFT + PLOT_W] x [TOP, TOP + PLOT_H]``
in SVG user units.  Values map linearly onto it (after log10 for the radial
chart); :func:`linear_axis` and :func:`to_y` are the documented maps, so a
coordinate in the output can be checked against a data value.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Mapping
from xml.sax.saxutils import escape

import numpy as np

from . import __version__
from .batch import SummaryStats
from .spectrum import RadialSpectrum

WIDTH, HEIGHT = 640, 420
LEFT, TOP, PLOT_W, PLOT_H = 80.0, 30.0, 520.0, 320.0
GENERATOR = f"<!-- generated by cloudscope {__version__} -->"


def linear_axis(lo: float, hi: float, pad: float = 0.05) -> tuple[float, float]:
    """Axis range: data range widened by ``pad`` of its span on both sides.

    A zero span is widened to ``+-pad`` around the value.
    """
    span = hi - lo
    if span == 0:
        return lo - pad, hi + pad
    return lo - pad * span, hi + pad * span


def to_y(value: float, lo: float, hi: float) -> float:
    return TOP + (hi - value) / (hi - lo) * PLOT_H


def to_x(value: float, lo: float, hi: float) -> float:
    return LEFT + (value - lo) / (hi - lo) * PLOT_W


def _f(x: float) -> str:
    return f"{x:.3f}"


def _frame(title: str, body: list[str], xlabel: str, ylabel: str) -> str:
    head = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        GENERATOR,
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<title>{escape(title)}</title>',
        f'<rect class="frame" x="{_f(LEFT)}" y="{_f(TOP)}" width="{_f(PLOT_W)}" '
        f'height="{_f(PLOT_H)}" fill="none" stroke="black"/>',
        f'<text x="{_f(LEFT + PLOT_W / 2)}" y="{HEIGHT - 20}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="20" y="{_f(TOP + PLOT_H / 2)}" text-anchor="middle" '
        f'transform="rotate(-90 20 {_f(TOP + PLOT_H / 2)})">{escape(ylabel)}</text>',
    ]
    return "\n".join(head + body + ["</svg>"]) + "\n"


def _log_ticks(lo: float, hi: float) -> list[int]:
    return list(range(math.ceil(lo), math.floor(hi) + 1))


def radial_loglog_svg(rs: RadialSpectrum, title: str = "Rotation mean of the power spectrum") -> str:
    """Log-log chart of k1 (um^2) against rho (1/um); one circle per annulus.

    Annuli with zero density have no logarithm and are skipped.
    """
    keep = rs.density > 0
    rho, k1 = np.log10(rs.rho[keep]), np.log10(rs.density[keep])
    if rho.size == 0:
        raise ValueError("nothing to plot: radial spectrum has no positive values")
    xlo, xhi = (rho.min(), rho.max()) if rho.size > 1 else (rho[0] - 0.5, rho[0] + 0.5)
    ylo, yhi = (k1.min(), k1.max()) if np.ptp(k1) > 0 else (k1[0] - 0.5, k1[0] + 0.5)
    xlo, xhi = linear_axis(xlo, xhi)
    ylo, yhi = linear_axis(ylo, yhi)
    body = []
    for t in _log_ticks(xlo, xhi):
        x = to_x(t, xlo, xhi)
        body.append(f'<line class="tick" x1="{_f(x)}" y1="{_f(TOP + PLOT_H)}" x2="{_f(x)}" '
                    f'y2="{_f(TOP + PLOT_H + 5)}" stroke="black"/>')
        body.append(f'<text x="{_f(x)}" y="{_f(TOP + PLOT_H + 18)}" text-anchor="middle">1e{t}</text>')
    for t in _log_ticks(ylo, yhi):
        y = to_y(t, ylo, yhi)
        body.append(f'<line class="tick" x1="{_f(LEFT - 5)}" y1="{_f(y)}" x2="{_f(LEFT)}" '
                    f'y2="{_f(y)}" stroke="black"/>')
        body.append(f'<text x="{_f(LEFT - 8)}" y="{_f(y + 4)}" text-anchor="end">1e{t}</text>')
    pts = [(to_x(a, xlo, xhi), to_y(b, ylo, yhi)) for a, b in zip(rho, k1)]
    if len(pts) > 1:
        path = " ".join(f"{_f(x)},{_f(y)}" for x, y in pts)
        body.append(f'<polyline class="curve" points="{path}" fill="none" stroke="steelblue"/>')
    for (x, y), a, b in zip(pts, rho, k1):
        body.append(f'<circle class="point" cx="{_f(x)}" cy="{_f(y)}" r="2" fill="steelblue" '
                    f'data-rho="{10 ** a:.9g}" data-k1="{10 ** b:.9g}"/>')
    return _frame(title, body, "rho [1/um]", "k1 [um^2]")


def boxplot_svg(groups: Mapping[str, SummaryStats], title: str = "Cloudiness index") -> str:
    """Box per group (q1..q3, median line, whiskers to min and max) on a shared linear axis.

    The axis is :func:`linear_axis` of the overall min and max; groups
    without quartiles (fewer than three values) get a median line and
    whiskers only.
    """
    if not groups:
        raise ValueError("nothing to plot: no groups")
    lo, hi = linear_axis(min(s.min for s in groups.values()), max(s.max for s in groups.values()))
    slot = PLOT_W / len(groups)
    half = min(0.3 * slot, 40.0)
    body = [f'<g class="axis" data-lo="{lo!r}" data-hi="{hi!r}">']
    for i in range(6):
        v = lo + (hi - lo) * i / 5
        y = to_y(v, lo, hi)
        body.append(f'<line class="tick" x1="{_f(LEFT - 5)}" y1="{_f(y)}" x2="{_f(LEFT)}" '
                    f'y2="{_f(y)}" stroke="black"/>')
        body.append(f'<text x="{_f(LEFT - 8)}" y="{_f(y + 4)}" text-anchor="end">{v:.3g}</text>')
    body.append("</g>")
    for i, (name, s) in enumerate(groups.items()):
        cx = LEFT + slot * (i + 0.5)
        body.append(f'<g class="group" data-name="{escape(name, {chr(34): "&quot;"})}">')
        body.append(f'<line class="whisker" x1="{_f(cx)}" y1="{_f(to_y(s.min, lo, hi))}" '
                    f'x2="{_f(cx)}" y2="{_f(to_y(s.max, lo, hi))}" stroke="black"/>')
        for v, cls in ((s.min, "min"), (s.max, "max")):
            y = to_y(v, lo, hi)
            body.append(f'<line class="{cls}" x1="{_f(cx - half / 2)}" y1="{_f(y)}" '
                        f'x2="{_f(cx + half / 2)}" y2="{_f(y)}" stroke="black"/>')
        if s.q1 is not None and s.q3 is not None:
            top, bottom = to_y(s.q3, lo, hi), to_y(s.q1, lo, hi)
            body.append(f'<rect class="box" x="{_f(cx - half)}" y="{_f(top)}" width="{_f(2 * half)}" '
                        f'height="{_f(bottom - top)}" fill="lightsteelblue" stroke="black"/>')
        y = to_y(s.median, lo, hi)
        body.append(f'<line class="median" x1="{_f(cx - half)}" y1="{_f(y)}" x2="{_f(cx + half)}" '
                    f'y2="{_f(y)}" stroke="firebrick" stroke-width="2" data-value="{s.median!r}"/>')
        body.append(f'<text x="{_f(cx)}" y="{_f(TOP + PLOT_H + 18)}" text-anchor="middle">'
                    f'{escape(name)}</text>')
        body.append("</g>")
    return _frame(title, body, "sample", "CLI")


def emit_svg_plot(data, kind: str, path) -> None:
    """Write a ``radial_loglog`` chart of a RadialSpectrum or a ``boxplot`` of
    a mapping ``{group name: SummaryStats}``."""
    if kind == "radial_loglog":
        if not isinstance(data, RadialSpectrum) or len(data) == 0:
            raise ValueError("radial plot needs a nonempty RadialSpectrum")
        text = radial_loglog_svg(data)
    elif kind == "boxplot":
        text = boxplot_svg(data)
    else:
        raise ValueError(f"unknown plot kind {kind!r}")
    Path(path).write_text(text)
