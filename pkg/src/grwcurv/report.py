"""Report serialization: JSON with 17 significant digits, CSV and an aligned text table."""
from __future__ import annotations

import csv
import io
import math
from typing import Any

import numpy as np

FLOAT_FMT = "%.17g"


def _num(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = FLOAT_FMT % x
    # keep floats recognisable as floats
    if all(ch.isdigit() or ch == "-" for ch in s):
        s += ".0"
    return s


def _esc(s: str) -> str:
    import json

    return json.dumps(s, ensure_ascii=False)


def to_json(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON; key order is insertion order."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, str):
        return _esc(obj)
    if isinstance(obj, complex):
        return to_json([obj.real, obj.imag], indent, _level)
    if isinstance(obj, np.ndarray):
        return to_json(obj.tolist(), indent, _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_esc(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, set)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(isinstance(v, (int, float, bool, np.number, str)) or v is None for v in seq):
            return "[" + ", ".join(to_json(v, indent, _level + 1) for v in seq) + "]"
        items = [pad + to_json(v, indent, _level + 1) for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cell(v: Any) -> str:
    if isinstance(v, (float, np.floating)):
        return FLOAT_FMT % v
    if v is None:
        return ""
    return str(v)


def to_csv(rows: list, columns: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def _short(v: Any) -> str:
    if isinstance(v, (float, np.floating)):
        return f"{v:.6g}"
    if v is None:
        return "-"
    return str(v)


def to_table(rows: list, columns: list) -> str:
    cells = [[_short(r.get(c)) for c in columns] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def payload(report: dict) -> dict:
    """Report without the wall-clock field, for determinism comparisons."""
    return {k: v for k, v in report.items() if k != "wall_clock_s"}
