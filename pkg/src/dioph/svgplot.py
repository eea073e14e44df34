"""Deterministic SVG bar-ladder rendering of interval sets over [0, 1].

Pure text assembly: identical inputs produce identical bytes.  Coordinates
are fixed-point decimals derived from exact rationals (no binary floats).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from .dioset import IntervalSet

_MARGIN_X = 60
_BAR_WIDTH = 720
_BAR_HEIGHT = 22
_ROW_GAP = 12
_TOP = 30
_AXIS_EXTRA = 34


def _coord(x: Fraction, scale: int = _BAR_WIDTH, decimals: int = 3) -> str:
    """Fixed-point decimal of x*scale, truncated deterministically."""
    scaled = Fraction(x) * scale * 10 ** decimals
    units = scaled.numerator // scaled.denominator
    sign = "-" if units < 0 else ""
    units = abs(units)
    whole, frac = divmod(units, 10 ** decimals)
    return f"{sign}{whole}.{str(frac).zfill(decimals)}"


def render_svg(rows: Sequence[tuple[str, IntervalSet]],
               alpha_ticks: Optional[Sequence[Fraction]] = None) -> str:
    """One horizontal bar per labelled interval set, x-axis spanning [0, 1].

    Optional tick marks (e.g. convergents of a chosen number) are drawn along
    the axis.  Empty sets render as empty bars.
    """
    if not rows:
        raise ValueError("render_svg needs at least one row")
    height = _TOP + len(rows) * (_BAR_HEIGHT + _ROW_GAP) + _AXIS_EXTRA
    width = _MARGIN_X * 2 + _BAR_WIDTH
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    for i, (label, s) in enumerate(rows):
        y = _TOP + i * (_BAR_HEIGHT + _ROW_GAP)
        out.append(
            f'<text x="{_MARGIN_X - 8}" y="{y + _BAR_HEIGHT - 6}" '
            f'font-family="monospace" font-size="12" text-anchor="end">{_esc(label)}</text>'
        )
        out.append(
            f'<rect x="{_MARGIN_X}" y="{y}" width="{_BAR_WIDTH}" height="{_BAR_HEIGHT}" '
            f'fill="none" stroke="#999" stroke-width="1"/>'
        )
        for lo, hi in s.intervals:
            x = _coord(lo)
            w = _coord(hi - lo)
            if w == "0.000":
                w = "0.750"  # make degenerate member points visible
            out.append(
                f'<rect x="{_offset(x)}" y="{y + 1}" width="{w}" '
                f'height="{_BAR_HEIGHT - 2}" fill="#3d6fb4"/>'
            )
    axis_y = _TOP + len(rows) * (_BAR_HEIGHT + _ROW_GAP) + 8
    out.append(
        f'<line x1="{_MARGIN_X}" y1="{axis_y}" x2="{_MARGIN_X + _BAR_WIDTH}" '
        f'y2="{axis_y}" stroke="black" stroke-width="1"/>'
    )
    for num, label in ((Fraction(0), "0"), (Fraction(1, 2), "1/2"), (Fraction(1), "1")):
        x = _offset(_coord(num))
        out.append(
            f'<line x1="{x}" y1="{axis_y}" x2="{x}" y2="{axis_y + 5}" '
            f'stroke="black" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{x}" y="{axis_y + 18}" font-family="monospace" '
            f'font-size="11" text-anchor="middle">{label}</text>'
        )
    for t in alpha_ticks or ():
        if not 0 <= t <= 1:
            continue
        x = _offset(_coord(Fraction(t)))
        out.append(
            f'<line x1="{x}" y1="{axis_y - 4}" x2="{x}" y2="{axis_y}" '
            f'stroke="#b43d3d" stroke-width="1"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _offset(coord: str) -> str:
    whole, frac = coord.split(".")
    return f"{int(whole) + _MARGIN_X}.{frac}"


def _esc(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;"))
