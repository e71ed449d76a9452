"""Heatmap export: CSV with full-precision values and 8-bit binary PGM."""
from pathlib import Path

import numpy as np

from ..errors import DomainError, FormatError


def pgm_bytes(values):
    """Min-max normalised grey levels; ``values[0]`` becomes the top row.

    A constant field maps to level 0 everywhere.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 2 or not np.all(np.isfinite(v)):
        raise DomainError("PGM export needs a finite 2-D array")
    lo, hi = v.min(), v.max()
    if hi > lo:
        levels = np.rint(255.0 * (v - lo) / (hi - lo)).astype(np.uint8)
    else:
        levels = np.zeros(v.shape, dtype=np.uint8)
    ny, nx = v.shape
    return f"P5\n{nx} {ny}\n255\n".encode("ascii") + levels.tobytes(order="C")


def display_rows(field):
    """Field values flipped so that row 0 is the top (largest y) of the region."""
    return np.flipud(np.asarray(field.values))


def write_csv(field, path):
    pts = field.grid.points
    vals = np.asarray(field.values).ravel()
    lines = ["x,y,value"]
    lines += [f"{x!r},{y!r},{v!r}" for (x, y), v in zip(pts.tolist(), vals.tolist())]
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path):
    """Return ``(points, values)`` from a file written by :func:`write_csv`."""
    text = Path(path).read_text().splitlines()
    if not text or text[0] != "x,y,value":
        raise FormatError(f"{path}: line 1: expected header 'x,y,value'")
    rows = np.array([[float(v) for v in line.split(",")] for line in text[1:]])
    return rows[:, :2], rows[:, 2]


def export_heatmap(field, prefix):
    """Write ``<prefix>.csv`` and ``<prefix>.pgm``; return both paths."""
    prefix = Path(prefix)
    csv_path = prefix.with_name(prefix.name + ".csv")
    pgm_path = prefix.with_name(prefix.name + ".pgm")
    try:
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        write_csv(field, csv_path)
        pgm_path.write_bytes(pgm_bytes(display_rows(field)))
    except OSError as exc:
        raise OSError(f"cannot write heatmap at {prefix}: {exc}") from exc
    return csv_path, pgm_path
