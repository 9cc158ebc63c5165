"""CSV and SVG emission for the experiment runner.

CSV layout: one header line of column names, one '#' comment line carrying
the full configuration and seed, then data rows at 17 significant digits.
Two runs with the same configuration must produce identical bytes, so
nothing time- or host-dependent may enter here.

The SVG writers take parsed CSV content, never live experiment state, so a
plot is a pure function of the file it sits next to.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

__all__ = [
    "format_value",
    "write_csv",
    "parse_csv",
    "line_plot_svg",
]

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2")

# plot geometry, fixed so output bytes are stable
_WIDTH = 720
_HEIGHT = 440
_MARGIN_L = 64
_MARGIN_R = 16
_MARGIN_T = 28
_MARGIN_B = 44


def format_value(v: float) -> str:
    """17 significant digits, enough to round-trip a double."""
    return format(float(v), ".17g")


def write_csv(path: str, columns: Sequence[str], rows: Sequence[Sequence[float]],
              comment: str) -> None:
    """Write header, '# comment', and data rows; newline-terminated, LF only."""
    lines = [",".join(columns), "# " + comment]
    for row in rows:
        if len(row) != len(columns):
            raise ValueError("row width does not match column count")
        lines.append(",".join(format_value(v) for v in row))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def parse_csv(text: str) -> tuple[list[str], str, list[list[float]]]:
    """Inverse of write_csv: (columns, comment, rows)."""
    lines = [ln for ln in text.split("\n") if ln != ""]
    if not lines:
        raise ValueError("empty CSV")
    columns = lines[0].split(",")
    comment = ""
    body = lines[1:]
    if body and body[0].startswith("#"):
        comment = body[0][1:].strip()
        body = body[1:]
    rows = [[float(tok) for tok in ln.split(",")] for ln in body]
    return columns, comment, rows


def _ticks(lo: float, hi: float, log: bool) -> list[float]:
    if log:
        lo_e = math.floor(lo)
        hi_e = math.ceil(hi)
        step = max(1, (hi_e - lo_e) // 8)
        return [float(e) for e in range(lo_e, hi_e + 1, step)]
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / 6.0
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 0.5 * step:
        ticks.append(t)
        t += step
    return ticks


def _fmt_tick(v: float, log: bool) -> str:
    if log:
        return f"1e{int(round(v))}"
    return f"{v:.6g}"


def line_plot_svg(
    x: Sequence[float],
    series: Sequence[Sequence[float]],
    labels: Sequence[str],
    title: str,
    x_label: str,
    y_label: str,
    log_y: bool = False,
    y_floor: float = 1e-18,
) -> str:
    """Minimal multi-series line plot.

    log_y plots log10 of the values, clamping at y_floor so substituted
    failure spikes stay drawable.  Coordinates are formatted to fixed
    precision; identical inputs give identical bytes.
    """
    if len(series) != len(labels):
        raise ValueError("one label per series")
    xs = [float(v) for v in x]
    if not xs or any(len(s) != len(xs) for s in series):
        raise ValueError("series must be non-empty and match x in length")

    def transform(v: float) -> float:
        if log_y:
            return math.log10(max(abs(v), y_floor))
        return v

    ty = [[transform(v) for v in s] for s in series]
    x_lo, x_hi = min(xs), max(xs)
    y_lo = min(min(s) for s in ty)
    y_hi = max(max(s) for s in ty)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def px(v: float) -> float:
        return _MARGIN_L + (v - x_lo) / (x_hi - x_lo) * plot_w

    def py(v: float) -> float:
        return _MARGIN_T + (y_hi - v) / (y_hi - y_lo) * plot_h

    out = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">'
    )
    out.append(f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>')
    out.append(
        f'<text x="{_WIDTH // 2}" y="18" font-family="sans-serif" font-size="14" '
        f'text-anchor="middle">{title}</text>'
    )
    frame = (
        f'M {_MARGIN_L} {_MARGIN_T} L {_MARGIN_L} {_HEIGHT - _MARGIN_B} '
        f'L {_WIDTH - _MARGIN_R} {_HEIGHT - _MARGIN_B}'
    )
    out.append(f'<path d="{frame}" fill="none" stroke="black" stroke-width="1"/>')
    for t in _ticks(x_lo, x_hi, False):
        if t < x_lo - 1e-12 or t > x_hi + 1e-12:
            continue
        xp = px(t)
        out.append(
            f'<line x1="{xp:.2f}" y1="{_HEIGHT - _MARGIN_B}" x2="{xp:.2f}" '
            f'y2="{_HEIGHT - _MARGIN_B + 5}" stroke="black"/>'
        )
        out.append(
            f'<text x="{xp:.2f}" y="{_HEIGHT - _MARGIN_B + 18}" font-family="sans-serif" '
            f'font-size="11" text-anchor="middle">{_fmt_tick(t, False)}</text>'
        )
    for t in _ticks(y_lo, y_hi, log_y):
        if t < y_lo - 1e-12 or t > y_hi + 1e-12:
            continue
        yp = py(t)
        out.append(
            f'<line x1="{_MARGIN_L - 5}" y1="{yp:.2f}" x2="{_MARGIN_L}" '
            f'y2="{yp:.2f}" stroke="black"/>'
        )
        out.append(
            f'<text x="{_MARGIN_L - 8}" y="{yp + 4:.2f}" font-family="sans-serif" '
            f'font-size="11" text-anchor="end">{_fmt_tick(t, log_y)}</text>'
        )
    out.append(
        f'<text x="{_MARGIN_L + plot_w / 2:.2f}" y="{_HEIGHT - 8}" font-family="sans-serif" '
        f'font-size="12" text-anchor="middle">{x_label}</text>'
    )
    out.append(
        f'<text x="14" y="{_MARGIN_T + plot_h / 2:.2f}" font-family="sans-serif" '
        f'font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 14 {_MARGIN_T + plot_h / 2:.2f})">{y_label}</text>'
    )
    for i, (s, label) in enumerate(zip(ty, labels)):
        color = _PALETTE[i % len(_PALETTE)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(xs, s))
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        ly = _MARGIN_T + 14 + 16 * i
        lx = _WIDTH - _MARGIN_R - 150
        out.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        out.append(
            f'<text x="{lx + 28}" y="{ly}" font-family="sans-serif" '
            f'font-size="11">{label}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
