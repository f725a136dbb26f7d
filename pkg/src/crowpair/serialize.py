"""Round-trip text serialization of tables and spectral matrices."""

from __future__ import annotations

import io
import json
import math
from typing import Iterable, Sequence

import numpy as np


def fmt(x) -> str:
    """17 significant digits, enough to reread every double exactly."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")
    return out.getvalue()


def plot_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    """Whitespace-separated table with a commented header (gnuplot style)."""
    out = io.StringIO()
    out.write("# " + " ".join(header) + "\n")
    for row in rows:
        out.write(" ".join("nan" if v is None or v == "" else (v if isinstance(v, str) else fmt(v)) for v in row) + "\n")
    return out.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def json_text(obj) -> str:
    """Deterministic JSON; Python floats already serialize with round-trip precision."""
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def matrix_text(ws_hz: np.ndarray, wi_hz: np.ndarray, values: np.ndarray, amplitude: bool = False) -> str:
    """
    Line 1 ``ws_hz: ...``, line 2 ``wi_hz: ...``, then one row per signal
    frequency. Intensity rows hold real values, amplitude rows ``re,im`` pairs.
    """
    out = io.StringIO()
    out.write("ws_hz: " + " ".join(fmt(v) for v in ws_hz) + "\n")
    out.write("wi_hz: " + " ".join(fmt(v) for v in wi_hz) + "\n")
    for row in values:
        if amplitude:
            out.write(" ".join(f"{fmt(v.real)},{fmt(v.imag)}" for v in row) + "\n")
        else:
            out.write(" ".join(fmt(v) for v in np.real(row)) + "\n")
    return out.getvalue()


def read_matrix(text: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Inverse of :func:`matrix_text`; amplitude files come back complex."""
    lines = text.strip("\n").split("\n")
    if not lines[0].startswith("ws_hz:") or not lines[1].startswith("wi_hz:"):
        raise ValueError("matrix file needs ws_hz and wi_hz header lines")
    ws = np.array([float(v) for v in lines[0].split()[1:]])
    wi = np.array([float(v) for v in lines[1].split()[1:]])
    rows = []
    for line in lines[2:]:
        toks = line.split()
        if toks and "," in toks[0]:
            rows.append([complex(*map(float, t.split(","))) for t in toks])
        else:
            rows.append([float(t) for t in toks])
    vals = np.array(rows)
    if vals.shape != (len(ws), len(wi)):
        raise ValueError(f"matrix shape {vals.shape} does not match axes ({len(ws)}, {len(wi)})")
    return ws, wi, vals


def matrix_plot_text(ws_hz: np.ndarray, wi_hz: np.ndarray, values: np.ndarray) -> str:
    """gnuplot ``splot`` blocks: one ``ws wi value`` line per cell, blank line per row."""
    out = io.StringIO()
    out.write("# ws_hz wi_hz value\n")
    for j, s in enumerate(ws_hz):
        for k, i in enumerate(wi_hz):
            out.write(f"{fmt(s)} {fmt(i)} {fmt(np.real(values[j, k]))}\n")
        out.write("\n")
    return out.getvalue()
