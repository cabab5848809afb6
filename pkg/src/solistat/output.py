"""Flat-file writers: CSV tables, JSON reports and standalone SVG line plots."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .errors import SolistatError
from .numkit import Samples1D

__all__ = [
    "OutputError",
    "PROFILE_COLUMNS",
    "SNAPSHOT_COLUMNS",
    "Curve",
    "emit_csv",
    "emit_profile_csv",
    "dumps",
    "read_csv",
    "emit_json",
    "emit_svg",
    "nice_ticks",
]

PROFILE_COLUMNS = ("eta", "phi", "dphi", "ddphi")
SNAPSHOT_COLUMNS = ("t", "x", "phi", "v")

WIDTH, HEIGHT = 800, 500
_MARGIN = dict(left=80, right=180, top=40, bottom=60)
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


class OutputError(SolistatError):
    """A file could not be written or the data cannot be rendered."""


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_text(path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from None
    return path


def _profile_rows(samples, ddphi):
    grid = np.asarray(samples.grid, dtype=float)
    values = np.asarray(samples.values, dtype=float)
    n = grid.size
    d1 = np.full(n, math.nan) if samples.derivative is None else np.asarray(samples.derivative, float)
    d2 = np.full(n, math.nan) if ddphi is None else np.asarray(ddphi, dtype=float)
    return [(grid[i], values[i], d1[i], d2[i]) for i in range(n)]


def emit_csv(data, path, ddphi=None) -> Path:
    """Write a profile or a snapshot stream as CSV.

    ``data`` is either a :class:`Samples1D` (columns eta,phi,dphi,ddphi; pass
    ``ddphi`` separately or it is written as nan), an object with ``samples``
    and ``second_derivative`` attributes, or a sequence of grid snapshots
    (columns t,x,phi,v). An empty sequence gives a header-only snapshot file.
    """
    if hasattr(data, "samples") and hasattr(data, "second_derivative"):
        header, rows = PROFILE_COLUMNS, _profile_rows(data.samples, data.second_derivative)
    elif isinstance(data, Samples1D):
        header, rows = PROFILE_COLUMNS, _profile_rows(data, ddphi)
    else:
        header, rows = SNAPSHOT_COLUMNS, []
        for snap in data:
            x = snap.x
            for i in range(x.size):
                rows.append((snap.t, x[i], snap.phi[i], snap.v[i]))
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return _write_text(path, "\n".join(lines) + "\n")


def emit_profile_csv(path, eta, phi, dphi, ddphi) -> Path:
    """Profile CSV from plain arrays (possibly empty)."""
    cols = [np.asarray(c, dtype=float).reshape(-1) for c in (eta, phi, dphi, ddphi)]
    lines = [",".join(PROFILE_COLUMNS)]
    lines.extend(",".join(_fmt(c[i]) for c in cols) for i in range(cols[0].size))
    return _write_text(path, "\n".join(lines) + "\n")


def read_csv(path):
    """Return ``(header, float array of shape (rows, columns))``."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        rows = [[float(v) for v in row] for row in reader]
    arr = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return header, arr


def _json_safe(obj):
    if isinstance(obj, float):
        if math.isfinite(obj):
            return obj
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return _json_safe(obj.item())
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_json_safe(v) for v in obj.tolist()]
    return obj


def dumps(obj) -> str:
    """Strict JSON: nan becomes null and infinities the strings "inf"/"-inf"."""
    return json.dumps(_json_safe(obj), indent=2, allow_nan=False) + "\n"


def emit_json(obj, path) -> Path:
    return _write_text(path, dumps(obj))


# ---------------------------------------------------------------------------
# SVG


@dataclass(frozen=True)
class Curve:
    name: str
    x: Sequence[float]
    y: Sequence[float]


def nice_ticks(lo: float, hi: float, target: int = 6) -> List[float]:
    """Round tick positions (steps of 1, 2 or 5 times a power of ten) covering [lo, hi]."""
    if hi < lo:
        lo, hi = hi, lo
    span = hi - lo
    if span == 0:
        return [lo]
    raw = span / max(target - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1.0, 2.0, 5.0, 10.0) if m * mag >= raw)
    first = math.ceil(lo / step - 1e-9)
    ticks = []
    k = first
    while k * step <= hi + 1e-9 * step:
        val = k * step
        ticks.append(0.0 if abs(val) < 1e-12 * step else val)
        k += 1
    return ticks


def _tick_label(v: float) -> str:
    return format(v, ".6g")


def emit_svg(
    curves: Iterable[Curve],
    path,
    title: str = "",
    xlabel: str = "x",
    ylabel: str = "y",
) -> Path:
    """Line plot on a fixed 800x500 canvas with linear axes and a legend.

    Raises
    ------
    OutputError
        With no curves, or when a curve holds non-finite values (the message
        names the curve).
    """
    curves = list(curves)
    if not curves:
        raise OutputError("emit_svg needs at least one curve")
    data = []
    for c in curves:
        x = np.asarray(c.x, dtype=float).reshape(-1)
        y = np.asarray(c.y, dtype=float).reshape(-1)
        if x.size != y.size or x.size == 0:
            raise OutputError(f"curve {c.name!r}: x and y must be non-empty and of equal length")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise OutputError(f"curve {c.name!r} contains non-finite values")
        data.append((c.name, x, y))

    x_lo = min(float(x.min()) for _, x, _ in data)
    x_hi = max(float(x.max()) for _, x, _ in data)
    y_lo = min(float(y.min()) for _, _, y in data)
    y_hi = max(float(y.max()) for _, _, y in data)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1.0, x_hi + 1.0
    if y_hi == y_lo:
        pad = max(abs(y_lo), 1.0) * 0.5
        y_lo, y_hi = y_lo - pad, y_hi + pad
    else:
        pad = 0.05 * (y_hi - y_lo)
        y_lo, y_hi = y_lo - pad, y_hi + pad

    left, top = _MARGIN["left"], _MARGIN["top"]
    pw = WIDTH - _MARGIN["left"] - _MARGIN["right"]
    ph = HEIGHT - _MARGIN["top"] - _MARGIN["bottom"]

    def sx(v):
        return left + (v - x_lo) / (x_hi - x_lo) * pw

    def sy(v):
        return top + (y_hi - v) / (y_hi - y_lo) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    if title:
        out.append(
            f'<text x="{left + pw / 2:.2f}" y="{top - 15}" text-anchor="middle" '
            f'font-size="14">{escape(title)}</text>'
        )
    for v in nice_ticks(x_lo, x_hi):
        px = sx(v)
        out.append(f'<line x1="{px:.2f}" y1="{top + ph}" x2="{px:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(
            f'<text x="{px:.2f}" y="{top + ph + 20}" text-anchor="middle">{_tick_label(v)}</text>'
        )
    for v in nice_ticks(y_lo, y_hi):
        py = sy(v)
        out.append(f'<line x1="{left - 5}" y1="{py:.2f}" x2="{left}" y2="{py:.2f}" stroke="black"/>')
        out.append(
            f'<text x="{left - 8}" y="{py + 4:.2f}" text-anchor="end">{_tick_label(v)}</text>'
        )
    out.append(
        f'<text x="{left + pw / 2:.2f}" y="{HEIGHT - 15}" text-anchor="middle">{escape(xlabel)}</text>'
    )
    out.append(
        f'<text x="20" y="{top + ph / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 20 {top + ph / 2:.2f})">{escape(ylabel)}</text>'
    )
    for k, (name, x, y) in enumerate(data):
        color = _PALETTE[k % len(_PALETTE)]
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = top + 15 + 20 * k
        lx = left + pw + 15
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 25}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 32}" y="{ly + 4}">{escape(str(name))}</text>')
    out.append("</svg>")
    return _write_text(path, "\n".join(out) + "\n")
