"""Deterministic single-panel SVG line charts.

Output depends only on the input values: coordinates are printed with a
fixed number of decimals and nothing time- or environment-dependent is
written, so identical inputs give byte-identical files.
"""
from __future__ import annotations

import math
from typing import List, Mapping, Sequence, Tuple, Union
from xml.sax.saxutils import escape, quoteattr

from .errors import FrequencyMismatchError
from .ingest import _write
from .series import Series

WIDTH = 800
HEIGHT = 480
MARGIN_LEFT = 78
MARGIN_RIGHT = 24
MARGIN_TOP = 44
MARGIN_BOTTOM = 52
MAX_TICKS = 10
PAD = 0.05
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")

Curves = Union[Mapping[str, Series], Sequence[Tuple[str, Series]]]


def nice_ticks(lo: float, hi: float, max_ticks: int = MAX_TICKS) -> List[float]:
    """Round-number tick positions inside ``[lo, hi]``, at most ``max_ticks`` of them."""
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
        raise ValueError(f"invalid axis range {lo}..{hi}")
    if hi == lo:
        return [lo]
    raw = (hi - lo) / max(max_ticks - 1, 1)
    exp = math.floor(math.log10(raw))
    for e in (exp, exp + 1):
        for m in (1.0, 2.0, 2.5, 5.0):
            step = m * 10.0**e
            first = math.ceil(lo / step - 1e-9)
            last = math.floor(hi / step + 1e-9)
            if last - first + 1 <= max_ticks:
                return [_clean(k * step, step) for k in range(first, last + 1)]
    step = 10.0 ** (exp + 2)
    return [_clean(k * step, step) for k in range(math.ceil(lo / step), math.floor(hi / step) + 1)]


def _clean(v: float, step: float) -> float:
    # drop float noise below the step's own precision
    v = round(v, max(0, 3 - math.floor(math.log10(step))))
    return 0.0 if v == 0 else v


def _tick_label(v: float, ticks: Sequence[float]) -> str:
    if len(ticks) > 1:
        step = min(abs(b - a) for a, b in zip(ticks, ticks[1:]))
    else:
        step = abs(v) or 1.0
    decimals = max(0, -math.floor(math.log10(step) + 1e-12))
    if abs(step * 10**decimals - round(step * 10**decimals)) > 1e-9:
        decimals += 1
    text = f"{v:.{decimals}f}"
    return "0" if float(text) == 0 else text


def _padded(lo: float, hi: float) -> Tuple[float, float]:
    span = hi - lo
    if span == 0:
        # flat data: pad relative to the level itself
        span = abs(lo) if lo != 0 else 1.0
    return lo - PAD * span, hi + PAD * span


def _as_list(curves: Curves) -> List[Tuple[str, Series]]:
    items = list(curves.items()) if isinstance(curves, Mapping) else [tuple(c) for c in curves]
    if not items:
        raise ValueError("at least one curve is required")
    freq = items[0][1].frequency
    for label, s in items:
        if s.frequency is not freq:
            raise FrequencyMismatchError(f"curve {label!r} is {s.frequency.value}, expected {freq.value}")
        if len(s) == 0:
            raise ValueError(f"curve {label!r} is empty")
    return items


def _f(v: float) -> str:
    text = f"{v:.2f}"
    return "0.00" if text == "-0.00" else text


def render_svg(curves: Curves, title: str = "", x_label: str = "year", y_label: str = "") -> str:
    items = _as_list(curves)
    xs = [s.decimal_years() for _, s in items]
    ys = [s.values for _, s in items]
    x0, x1 = _padded(min(float(x.min()) for x in xs), max(float(x.max()) for x in xs))
    y0, y1 = _padded(min(float(y.min()) for y in ys), max(float(y.max()) for y in ys))
    pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(x):
        return MARGIN_LEFT + (x - x0) / (x1 - x0) * pw

    def py(y):
        return MARGIN_TOP + (y1 - y) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="26" text-anchor="middle" font-family="sans-serif" font-size="16">{escape(title)}</text>')
    out.append(
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw}" height="{ph}" fill="none" stroke="black" stroke-width="1"/>'
    )

    xt = nice_ticks(x0, x1)
    yt = nice_ticks(y0, y1)
    base = MARGIN_TOP + ph
    out.append('<g font-family="sans-serif" font-size="11" fill="black">')
    for v in xt:
        x = _f(px(v))
        out.append(f'<line x1="{x}" y1="{base}" x2="{x}" y2="{base + 5}" stroke="black"/>')
        out.append(f'<text x="{x}" y="{base + 18}" text-anchor="middle">{_tick_label(v, xt)}</text>')
    for v in yt:
        y = _f(py(v))
        out.append(f'<line x1="{MARGIN_LEFT - 5}" y1="{y}" x2="{MARGIN_LEFT}" y2="{y}" stroke="black"/>')
        out.append(f'<line x1="{MARGIN_LEFT}" y1="{y}" x2="{MARGIN_LEFT + pw}" y2="{y}" stroke="#dddddd"/>')
        out.append(f'<text x="{MARGIN_LEFT - 8}" y="{_f(py(v) + 4)}" text-anchor="end">{_tick_label(v, yt)}</text>')
    if x_label:
        out.append(f'<text x="{MARGIN_LEFT + pw / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle">{escape(x_label)}</text>')
    if y_label:
        cy = MARGIN_TOP + ph / 2
        out.append(f'<text x="16" y="{cy:.1f}" text-anchor="middle" transform="rotate(-90 16 {cy:.1f})">{escape(y_label)}</text>')
    out.append("</g>")

    for i, ((label, _), x, y) in enumerate(zip(items, xs, ys)):
        pts = " ".join(f"{_f(px(a))},{_f(py(b))}" for a, b in zip(x, y))
        color = PALETTE[i % len(PALETTE)]
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"><title>{escape(label)}</title></polyline>')

    lx = MARGIN_LEFT + pw - 180
    out.append('<g font-family="sans-serif" font-size="12">')
    out.append(
        f'<rect x="{lx - 8}" y="{MARGIN_TOP + 6}" width="182" height="{18 * len(items) + 8}" fill="white" fill-opacity="0.85" stroke="#999999"/>'
    )
    for i, (label, _) in enumerate(items):
        ly = MARGIN_TOP + 20 + 18 * i
        color = PALETTE[i % len(PALETTE)]
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 24}" y2="{ly}" stroke={quoteattr(color)} stroke-width="2"/>')
        out.append(f'<text x="{lx + 30}" y="{ly + 4}">{escape(label)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(curves: Curves, title: str, path, x_label: str = "year", y_label: str = "") -> None:
    """Render ``curves`` (label to series) and write the SVG to ``path``."""
    _write(path, render_svg(curves, title, x_label, y_label))
