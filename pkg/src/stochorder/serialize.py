"""Deterministic JSON and CSV output.

JSON floats use 17 significant digits and CSV floats use 12.  Non-finite values
become the strings ``"inf"``, ``"-inf"`` and ``"nan"``.  Key order is insertion order.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math

import numpy as np

JSON_DIGITS = 17
CSV_DIGITS = 12


def format_float(value: float, digits: int) -> str:
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if value == 0.0:
        return "0"
    return format(value, f".{digits}g")


def plain(obj):
    """Recursively convert dataclasses, tuples and numpy scalars to JSON-ready Python values."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: plain(getattr(obj, f.name)) for f in dataclasses.fields(obj) if f.repr}
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _emit(obj, out: list[str], indent: int, level: int) -> None:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        text = format_float(obj, JSON_DIGITS)
        out.append(text if math.isfinite(obj) else json.dumps(text))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f"{pad}{json.dumps(str(k))}: ")
            _emit(v, out, indent, level + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        if all(isinstance(v, (int, float, str, bool)) or v is None for v in obj):
            parts = []
            for v in obj:
                sub: list[str] = []
                _emit(v, sub, indent, level + 1)
                parts.append("".join(sub))
            out.append("[" + ", ".join(parts) + "]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _emit(v, out, indent, level + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "]")
    else:
        out.append(json.dumps(str(obj)))


def dumps_json(obj, indent: int = 2) -> str:
    out: list[str] = []
    _emit(plain(obj), out, indent, 0)
    return "".join(out) + "\n"


def csv_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format_float(float(value), CSV_DIGITS)
    if value is None:
        return ""
    return str(value)


def flatten(obj, prefix: str = "") -> list[tuple[str, object]]:
    """Nested dicts and lists as (dotted.key, scalar) rows."""
    obj = plain(obj)
    rows = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            rows.extend(flatten(v, f"{prefix}.{k}" if prefix else str(k)))
    elif isinstance(obj, list):
        if all(not isinstance(v, (dict, list)) for v in obj):
            rows.append((prefix, " ".join(csv_cell(v) for v in obj)))
        else:
            for i, v in enumerate(obj):
                rows.extend(flatten(v, f"{prefix}.{i}" if prefix else str(i)))
    else:
        rows.append((prefix, obj))
    return rows


def dumps_csv(rows, header) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([csv_cell(v) for v in row])
    return buf.getvalue()
