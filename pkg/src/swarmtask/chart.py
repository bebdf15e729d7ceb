"""Static SVG line charts from sweep CSV files.

The renderer is deliberately self-contained: text in, text out, no drawing
library, so chart bytes are reproducible across machines.  Rows are grouped
into one series per distinct combination of algorithm and whichever cell
parameters vary in the file (other than the x axis); each series plots the
across-trial mean of the chosen metric against the x parameter.  seed='mean'
rows are ignored and means recomputed, so charts do not depend on whether
the CSV kept its aggregate rows.
"""

from __future__ import annotations

import csv
import math
from typing import Dict, List, Sequence, Tuple

# cell parameters that may distinguish series, in label order
_PARAM_COLS = ("lambda_inv", "p_prop", "t_rw", "i_p", "t_p")

_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")

_W, _H = 760, 460
_ML, _MR, _MT, _MB = 76, 210, 24, 58


class ChartError(ValueError):
    pass


def read_rows(path: str) -> List[Dict[str, str]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ChartError("empty CSV")
        return list(reader)


def _series_points(rows: Sequence[Dict[str, str]], x_param: str,
                   metric: str) -> List[Tuple[str, List[Tuple[float, float]]]]:
    """Label and mean-metric points per series, deterministically ordered."""
    if not rows:
        raise ChartError("no data rows")
    columns = rows[0].keys()
    for name in (x_param, metric):
        if name not in columns:
            raise ChartError(f"unknown column {name!r}")
    trials = [r for r in rows if r.get("seed") not in ("mean", "", None)]

    group_cols = [c for c in _PARAM_COLS
                  if c != x_param and c in columns
                  and len({r[c] for r in trials}) > 1]

    sums: Dict[Tuple, Dict[float, List[float]]] = {}
    for r in trials:
        xs = r[x_param].strip()
        ms = r[metric].strip()
        if not xs or not ms:
            continue    # parameter unused by this row's algo, or no metric
        try:
            x = float(xs)
            m = float(ms)
        except ValueError:
            raise ChartError(f"non-numeric value in column "
                             f"{x_param if not xs else metric!r}") from None
        key = (r.get("algo", ""),) + tuple(r[c] for c in group_cols)
        sums.setdefault(key, {}).setdefault(x, []).append(m)

    out = []
    for key in sorted(sums):
        label = key[0]
        for col, val in zip(group_cols, key[1:]):
            if val:
                label += f" {col}={val}"
        pts = [(x, sum(v) / len(v)) for x, v in sorted(sums[key].items())]
        out.append((label, pts))
    if not out:
        raise ChartError(f"no plottable rows for x={x_param!r}, "
                         f"metric={metric!r}")
    return out


def _nice_ticks(lo: float, hi: float, target: int = 5) -> List[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / target
    mag = 10.0 ** math.floor(math.log10(raw))
    step = 10.0 * mag
    for mult in (1.0, 2.0, 5.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * span:
        ticks.append(0.0 if abs(t) < 1e-12 * span else t)
        t += step
    return ticks


def _marker(shape: int, cx: float, cy: float, color: str) -> str:
    c = f'{cx:.2f}', f'{cy:.2f}'
    if shape == 0:
        return f'<circle cx="{c[0]}" cy="{c[1]}" r="3.5" fill="{color}"/>'
    if shape == 1:
        return (f'<rect x="{cx - 3.2:.2f}" y="{cy - 3.2:.2f}" '
                f'width="6.4" height="6.4" fill="{color}"/>')
    if shape == 2:
        pts = f"{cx:.2f},{cy - 4.2:.2f} {cx - 3.8:.2f},{cy + 3.2:.2f} {cx + 3.8:.2f},{cy + 3.2:.2f}"
        return f'<polygon points="{pts}" fill="{color}"/>'
    if shape == 3:
        pts = (f"{cx:.2f},{cy - 4.5:.2f} {cx + 4.0:.2f},{cy:.2f} "
               f"{cx:.2f},{cy + 4.5:.2f} {cx - 4.0:.2f},{cy:.2f}")
        return f'<polygon points="{pts}" fill="{color}"/>'
    pts = f"{cx:.2f},{cy + 4.2:.2f} {cx - 3.8:.2f},{cy - 3.2:.2f} {cx + 3.8:.2f},{cy - 3.2:.2f}"
    return f'<polygon points="{pts}" fill="{color}"/>'


def render_chart(rows: Sequence[Dict[str, str]], x_param: str,
                 metric: str) -> str:
    """Render rows to a complete SVG document string."""
    series = _series_points(rows, x_param, metric)

    xs = [x for _, pts in series for x, _ in pts]
    ys = [y for _, pts in series for _, y in pts]
    xlo, xhi = min(xs), max(xs)
    ylo, yhi = min(ys), max(ys)
    if xhi == xlo:
        xlo, xhi = xlo - 1.0, xhi + 1.0
    if yhi == ylo:
        ylo, yhi = ylo - 1.0, yhi + 1.0
    ypad = 0.06 * (yhi - ylo)
    ylo, yhi = ylo - ypad, yhi + ypad

    pw = _W - _ML - _MR
    ph = _H - _MT - _MB

    def sx(x: float) -> float:
        return _ML + (x - xlo) / (xhi - xlo) * pw

    def sy(y: float) -> float:
        return _MT + ph - (y - ylo) / (yhi - ylo) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        '<g font-family="Helvetica, Arial, sans-serif" font-size="12" '
        'fill="#222">',
    ]

    for t in _nice_ticks(xlo, xhi):
        px = sx(t)
        parts.append(f'<line x1="{px:.2f}" y1="{_MT}" x2="{px:.2f}" '
                     f'y2="{_MT + ph}" stroke="#dddddd" stroke-width="1"/>')
        parts.append(f'<line x1="{px:.2f}" y1="{_MT + ph}" x2="{px:.2f}" '
                     f'y2="{_MT + ph + 5}" stroke="#222" stroke-width="1"/>')
        parts.append(f'<text x="{px:.2f}" y="{_MT + ph + 20}" '
                     f'text-anchor="middle">{t:g}</text>')
    for t in _nice_ticks(ylo, yhi):
        py = sy(t)
        parts.append(f'<line x1="{_ML}" y1="{py:.2f}" x2="{_ML + pw}" '
                     f'y2="{py:.2f}" stroke="#dddddd" stroke-width="1"/>')
        parts.append(f'<line x1="{_ML - 5}" y1="{py:.2f}" x2="{_ML}" '
                     f'y2="{py:.2f}" stroke="#222" stroke-width="1"/>')
        parts.append(f'<text x="{_ML - 9}" y="{py + 4:.2f}" '
                     f'text-anchor="end">{t:g}</text>')

    parts.append(f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" '
                 f'fill="none" stroke="#222" stroke-width="1"/>')
    parts.append(f'<text x="{_ML + pw / 2:.2f}" y="{_H - 14}" '
                 f'text-anchor="middle" font-size="13">{x_param}</text>')
    parts.append(f'<text x="18" y="{_MT + ph / 2:.2f}" text-anchor="middle" '
                 f'font-size="13" transform="rotate(-90 18 '
                 f'{_MT + ph / 2:.2f})">{metric}</text>')

    for i, (label, pts) in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        coords = [(sx(x), sy(y)) for x, y in pts]
        if len(coords) > 1:
            poly = " ".join(f"{px:.2f},{py:.2f}" for px, py in coords)
            parts.append(f'<polyline points="{poly}" fill="none" '
                         f'stroke="{color}" stroke-width="1.8"/>')
        for px, py in coords:
            parts.append(_marker(i % 5, px, py, color))
        ly = _MT + 10 + i * 20
        lx = _ML + pw + 14
        parts.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 26}" y2="{ly}" '
                     f'stroke="{color}" stroke-width="1.8"/>')
        parts.append(_marker(i % 5, lx + 13, ly, color))
        parts.append(f'<text x="{lx + 32}" y="{ly + 4}">{label}</text>')

    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_chart(csv_path: str, x_param: str, metric: str,
               out_path: str) -> None:
    """Chart a sweep CSV: mean metric vs x_param, one series per group."""
    svg = render_chart(read_rows(csv_path), x_param, metric)
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(svg)
