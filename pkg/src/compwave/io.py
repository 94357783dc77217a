"""CSV and key-value text files with exact float round-tripping."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, columns: dict) -> Path:
    """Write equal-length columns; floats use ``repr`` so they read back exactly."""
    path = Path(path)
    names = list(columns)
    data = [np.atleast_1d(np.asarray(columns[k])) for k in names]
    n = {len(col) for col in data}
    if len(n) > 1:
        raise ValueError(f"column lengths differ: {sorted(n)}")
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for row in zip(*data):
            writer.writerow([_fmt(v) for v in row])
    return path


def read_csv(path) -> dict:
    """Read a CSV written by :func:`write_csv` into float arrays."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        names = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    arr = np.array(rows, dtype=float).reshape(len(rows), len(names))
    return {name: arr[:, i] for i, name in enumerate(names)}


def write_kv(path, mapping: dict) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for key, value in mapping.items():
            fh.write(f"{key} = {_fmt(value)}\n")
    return path


def read_kv(path) -> dict:
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if "=" in line:
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out
