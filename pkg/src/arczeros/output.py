"""Deterministic CSV, JSON and SVG writers."""

from __future__ import annotations

import json
import math
import os

import numpy as np


def fmt(x) -> str:
    """17 significant digits, locale-free; round-trips every double."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def write_csv(path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else fmt(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return None if not math.isfinite(x) else x
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))


def ensure_dir(path) -> str:
    os.makedirs(path, exist_ok=True)
    return path


# --------------------------------------------------------------------------
# SVG: unit circle, arcs in bold, curve S dashed, zeros as dots, masses as crosses
# --------------------------------------------------------------------------

_SIZE = 480
_PAD = 40


def _xy(z) -> tuple:
    r = (_SIZE - 2 * _PAD) / 2.0
    c = _SIZE / 2.0
    return c + r * z.real, c - r * z.imag


def _pt(z) -> str:
    x, y = _xy(z)
    return f"{x:.3f},{y:.3f}"


def svg_figure(arcs, curve=None, zeros=(), masses=(), title: str = "") -> str:
    """Static figure in the plane of the original angles.

    ``arcs`` is a pair of (start, end) angle tuples; ``curve`` a complex array.
    """
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SIZE}" height="{_SIZE}" '
           f'viewBox="0 0 {_SIZE} {_SIZE}">']
    if title:
        out.append(f"<title>{title}</title>")
    c = _SIZE / 2.0
    r = (_SIZE - 2 * _PAD) / 2.0
    out.append(f'<circle cx="{c:.3f}" cy="{c:.3f}" r="{r:.3f}" fill="none" stroke="#999" stroke-width="1"/>')
    for lo, hi in arcs:
        t = np.linspace(lo, hi, 64)
        pts = " ".join(_pt(np.exp(1j * x)) for x in t)
        out.append(f'<path class="arc" d="M {pts.replace(" ", " L ")}" fill="none" stroke="#000" '
                   f'stroke-width="4"/>')
    if curve is not None and len(curve):
        pts = " ".join(_pt(z) for z in curve)
        out.append(f'<polyline class="curve-S" points="{pts}" fill="none" stroke="#1f77b4" '
                   f'stroke-width="1.5" stroke-dasharray="6,4"/>')
    for z in masses:
        x, y = _xy(z)
        out.append(f'<path class="mass" d="M {x - 6:.3f},{y - 6:.3f} L {x + 6:.3f},{y + 6:.3f} '
                   f'M {x - 6:.3f},{y + 6:.3f} L {x + 6:.3f},{y - 6:.3f}" stroke="#d62728" stroke-width="2"/>')
    for z in zeros:
        x, y = _xy(z)
        out.append(f'<circle class="zero" cx="{x:.3f}" cy="{y:.3f}" r="2.5" fill="#2ca02c"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
