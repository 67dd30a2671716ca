"""JSON and CSV output with 17 significant digits and an embedded run header."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

__all__ = ["format_float", "dumps", "write_json", "write_csv", "read_csv"]


def format_float(x):
    """Text for ``x`` with 17 significant digits (round-trips every double)."""
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return f"{x:.17g}"


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def dumps(obj, indent=2, _level=0):
    """JSON text in which every float carries 17 significant digits.

    The stdlib encoder writes the shortest round-trip form; this walks the
    structure itself so float text is uniform across files.  Non-finite
    values use the ``NaN``/``Infinity`` tokens that :func:`json.loads`
    accepts.
    """
    obj = _plain(obj)
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(_plain(v), (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_json(path, obj):
    path = Path(path)
    path.write_text(dumps(obj) + "\n", encoding="utf-8")
    return path


def write_csv(path, columns, rows, meta=None):
    """Write rows under a header; ``meta`` goes on a leading ``#`` line as JSON."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        if meta is not None:
            # shortest round-trip floats keep the header on one short line
            fh.write("# " + json.dumps({k: _plain(v) for k, v in meta.items()}) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([format_float(v) if isinstance(_plain(v), float) else _plain(v)
                        for v in row])
    return path


def read_csv(path):
    """Inverse of :func:`write_csv`: ``(meta, columns, float rows)``."""
    meta = None
    with Path(path).open(encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if lines and lines[0].startswith("# "):
        meta = json.loads(lines[0][2:])
        lines = lines[1:]
    reader = csv.reader(lines)
    columns = next(reader)
    rows = [[float(v) for v in r] for r in reader]
    return meta, columns, rows
