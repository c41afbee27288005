"""CSV and JSON emitters with fixed 17-significant-digit floats."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np


def fmt(x) -> str:
    return f"{float(x):.17g}"


def _json(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + _json(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if math.isnan(obj):
            return "null"
        if math.isinf(obj):
            return '"inf"' if obj > 0 else '"-inf"'
        return fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    return _json(obj, 2, 0) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def write_rows(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_trajectory_csv(path, p, traj) -> None:
    """Columns t, x, value; row-major by time level."""
    x = p.grid.x
    rows = ((fmt(t), fmt(xi), fmt(val))
            for t, level in zip(p.times, traj.values) for xi, val in zip(x, level))
    write_rows(path, ("t", "x", "value"), rows)


def write_control_csv(path, p, u) -> None:
    """Control on omega nodes, levels 1..nt; columns t, x, u."""
    idx = np.flatnonzero(p.chi)
    rows = ((fmt(t), fmt(p.grid.x[i]), fmt(row[i]))
            for t, row in zip(p.times[1:], np.asarray(u)) for i in idx)
    write_rows(path, ("t", "x", "u"), rows)


def read_control_csv(path, p) -> np.ndarray:
    """Inverse of ``write_control_csv``; off-omega entries are set to zero."""
    u = np.zeros((p.nt, p.grid.n))
    seen = np.zeros(u.shape, dtype=bool)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["t", "x", "u"]:
            raise ValueError(f"{path}: expected header t,x,u, got {reader.fieldnames}")
        for row in reader:
            m = int(round(float(row["t"]) / p.tau)) - 1
            i = int(round(float(row["x"]) / p.grid.h))
            if not (0 <= m < p.nt and 0 <= i < p.grid.n):
                raise ValueError(f"{path}: point (t={row['t']}, x={row['x']}) is off the grid")
            u[m, i] = float(row["u"])
            seen[m, i] = True
    missing = (p.chi > 0) & ~seen
    if missing.any():
        raise ValueError(f"{path}: {int(missing.sum())} control values on omega are missing")
    return u


def write_cost_history_csv(path, report) -> None:
    rows = []
    for k, (c, r) in enumerate(zip(report.cost_history, report.residual_history)):
        rows.append((k, fmt(c.tracking), fmt(c.regularization), fmt(c.total), fmt(r)))
    write_rows(path, ("iter", "tracking", "regularization", "total", "residual"), rows)
