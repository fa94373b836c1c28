"""Table, plot and manifest writers used by the command-line tool.

Numbers are written with ``repr`` (shortest round-trip form), which is
locale-independent and keeps every significant digit, so identical inputs
give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

SCHEMA_VERSION = 1


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return repr(float(value))


def csv_text(columns: Sequence[str], rows: Iterable[Sequence], comments: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"


def table_json(columns: Sequence[str], rows: Iterable[Sequence], meta: dict | None = None) -> str:
    body = {
        "schema_version": SCHEMA_VERSION,
        "columns": list(columns),
        "rows": [[None if v is None else (int(v) if isinstance(v, (int, np.integer)) else float(v))
                  for v in row] for row in rows],
    }
    if meta:
        body["meta"] = meta
    return json_text(body)


def write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def manifest_path(out: Path) -> Path:
    return out.with_name(out.stem + ".manifest.json")


# --- SVG -------------------------------------------------------------------

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 70, 20, 20, 50


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 5, 10) if s * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def _axes(xlo, xhi, ylo, yhi, xlabel, ylabel):
    pw, ph = _W - _ML - _MR, _H - _MT - _MB
    sx = lambda x: _ML + (x - xlo) / (xhi - xlo) * pw
    sy = lambda y: _MT + ph - (y - ylo) / (yhi - ylo) * ph
    parts = [f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for t in _ticks(xlo, xhi):
        x = sx(t)
        parts.append(f'<line x1="{x:.2f}" y1="{_MT + ph}" x2="{x:.2f}" y2="{_MT + ph + 5}" stroke="black"/>')
        parts.append(f'<text x="{x:.2f}" y="{_MT + ph + 18}" font-size="11" text-anchor="middle">{t:g}</text>')
    for t in _ticks(ylo, yhi):
        y = sy(t)
        parts.append(f'<line x1="{_ML - 5}" y1="{y:.2f}" x2="{_ML}" y2="{y:.2f}" stroke="black"/>')
        parts.append(f'<text x="{_ML - 8}" y="{y + 4:.2f}" font-size="11" text-anchor="end">{t:g}</text>')
    parts.append(f'<text x="{_ML + pw / 2}" y="{_H - 10}" font-size="13" text-anchor="middle">{xlabel}</text>')
    parts.append(f'<text x="15" y="{_MT + ph / 2}" font-size="13" text-anchor="middle" '
                 f'transform="rotate(-90 15 {_MT + ph / 2})">{ylabel}</text>')
    return parts, sx, sy


def _svg(parts: list[str]) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
            f'viewBox="0 0 {_W} {_H}">')
    return "\n".join([head, f'<rect width="{_W}" height="{_H}" fill="white"/>', *parts, "</svg>"]) + "\n"


def line_plot_svg(x, ys: dict[str, np.ndarray], xlabel: str, ylabel: str) -> str:
    x = np.asarray(x, dtype=float)
    finite = [np.asarray(y, dtype=float) for y in ys.values()]
    ylo = min(float(np.nanmin(y)) for y in finite)
    yhi = max(float(np.nanmax(y)) for y in finite)
    if yhi == ylo:
        yhi = ylo + 1.0
    pad = 0.05 * (yhi - ylo)
    xlo, xhi = float(x.min()), float(x.max())
    if xhi == xlo:
        xhi = xlo + 1.0
    parts, sx, sy = _axes(xlo, xhi, ylo - pad, yhi + pad, xlabel, ylabel)
    dashes = ("", ' stroke-dasharray="6 3"', ' stroke-dasharray="2 2"')
    for i, (name, y) in enumerate(ys.items()):
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y) if np.isfinite(b))
        parts.append(f'<polyline fill="none" stroke="black" stroke-width="1.2"{dashes[i % 3]} points="{pts}"/>')
        parts.append(f'<text x="{_W - _MR - 5}" y="{_MT + 15 + 14 * i}" font-size="11" text-anchor="end">{name}</text>')
    return _svg(parts)


def heatmap_svg(rho, phi, intensity, xlabel: str = "rho [mm]", ylabel: str = "phi [rad]",
                max_cells: int = 200) -> str:
    """Grey-scale map of ``intensity[i_rho, j_phi]`` on the (rho, phi) rectangle."""
    rho, phi = np.asarray(rho, dtype=float), np.asarray(phi, dtype=float)
    img = np.asarray(intensity, dtype=float)
    ri = np.unique(np.linspace(0, len(rho) - 1, min(len(rho), max_cells)).round().astype(int))
    pj = np.unique(np.linspace(0, len(phi) - 1, min(len(phi), max_cells)).round().astype(int))
    peak = float(img.max()) or 1.0
    phi_hi = 2 * math.pi
    parts, sx, sy = _axes(float(rho[0]), float(rho[-1]), 0.0, phi_hi, xlabel, ylabel)
    dr = (rho[-1] - rho[0]) / max(1, len(ri) - 1)
    dp = phi_hi / len(pj)
    cells = []
    for i in ri:
        for j in pj:
            level = int(round(255 * (1 - img[i, j] / peak)))
            x0, x1 = sx(max(rho[0], rho[i] - dr / 2)), sx(min(rho[-1], rho[i] + dr / 2))
            y0, y1 = sy(min(phi_hi, phi[j] + dp)), sy(phi[j])
            cells.append(f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{x1 - x0:.2f}" '
                         f'height="{y1 - y0:.2f}" fill="rgb({level},{level},{level})"/>')
    return _svg(cells + parts)
