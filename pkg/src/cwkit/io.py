"""File formats: CSV/NDJSON ingestion and CSV/JSON emission.

Floats are written with 17 significant digits (enough to round-trip
float64). All writers go through an atomic write-temp-then-rename so a
crashed run never leaves a truncated file behind.
"""

import json
import os
from pathlib import Path

import numpy as np

from .directions import Direction
from .errors import ParseError, RaggedRows
from .projections import AtomicMeasure, SampleSet


def _fmt(x):
    return f"{float(x):.17g}"


def atomic_write(path, text):
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_json(path, obj):
    atomic_write(path, json.dumps(obj, indent=2, allow_nan=False) + "\n")


# ---------------------------------------------------------------------------
# ingestion
# ---------------------------------------------------------------------------

def _parse_csv_rows(lines, path):
    rows = []
    width = None
    first = True
    for lineno, line in lines:
        cells = [c.strip() for c in line.split(",")]
        if first:
            first = False
            try:
                [float(c) for c in cells]
            except ValueError:
                continue  # optional single header row
        if width is not None and len(cells) != width:
            raise RaggedRows(f"{path}:{lineno}: expected {width} columns, got {len(cells)}",
                             row=lineno)
        parsed = []
        for col, cell in enumerate(cells, start=1):
            try:
                parsed.append(float(cell))
            except ValueError:
                raise ParseError(f"{path}:{lineno}: column {col}: not a number: {cell!r}",
                                 row=lineno, column=col) from None
        width = len(parsed)
        rows.append(parsed)
    return rows


def ingest_samples(path, fmt=None):
    """Read a SampleSet from CSV (optional single header row) or NDJSON.

    fmt is 'csv' or 'ndjson'; None infers from the file suffix, defaulting
    to csv. The file stem becomes the label.
    """
    path = Path(path)
    if fmt is None:
        fmt = "ndjson" if path.suffix.lower() in (".ndjson", ".jsonl") else "csv"
    if fmt not in ("csv", "ndjson"):
        raise ValueError("fmt must be 'csv' or 'ndjson'")
    raw = path.read_text(encoding="utf-8")
    lines = [(i, ln) for i, ln in enumerate(raw.splitlines(), start=1) if ln.strip()]
    if not lines:
        raise ParseError(f"{path}: no data rows")
    if fmt == "csv":
        rows = _parse_csv_rows(lines, path)
    else:
        rows = []
        width = None
        for lineno, line in lines:
            try:
                row = json.loads(line)
            except json.JSONDecodeError as err:
                raise ParseError(f"{path}:{lineno}: invalid JSON: {err.msg}",
                                 row=lineno) from None
            if not isinstance(row, list) or not all(isinstance(x, (int, float)) for x in row):
                raise ParseError(f"{path}:{lineno}: expected an array of numbers", row=lineno)
            if width is not None and len(row) != width:
                raise RaggedRows(f"{path}:{lineno}: expected {width} entries, got {len(row)}",
                                 row=lineno)
            width = len(row)
            rows.append([float(x) for x in row])
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return SampleSet(points=np.array(rows), label=path.stem)


def load_atomic_csv(path):
    """Read an AtomicMeasure from CSV rows of d coordinates plus a weight."""
    path = Path(path)
    lines = [(i, ln) for i, ln in enumerate(path.read_text(encoding="utf-8").splitlines(), 1)
             if ln.strip()]
    rows = _parse_csv_rows(lines, path)
    if not rows or len(rows[0]) < 2:
        raise ParseError(f"{path}: need at least one coordinate column plus a weight column")
    arr = np.array(rows)
    return AtomicMeasure(points=arr[:, :-1], weights=arr[:, -1])


def load_directions_csv(path):
    path = Path(path)
    lines = [(i, ln) for i, ln in enumerate(path.read_text(encoding="utf-8").splitlines(), 1)
             if ln.strip()]
    rows = _parse_csv_rows(lines, path)
    return [Direction(np.array(r)) for r in rows]


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

def directions_csv(directions):
    return "".join(",".join(_fmt(x) for x in u.coords) + "\n" for u in directions)


def samples_csv(sample_set):
    return "".join(",".join(_fmt(x) for x in row) + "\n" for row in sample_set.points)


def projected_csv(proj):
    lines = ["value,weight"]
    lines += [f"{_fmt(v)},{_fmt(w)}" for v, w in zip(proj.values, proj.weights)]
    return "\n".join(lines) + "\n"


def atomic_csv(measure):
    d = measure.dim
    lines = [",".join(f"x{i + 1}" for i in range(d)) + ",weight"]
    for p, w in zip(measure.points, measure.weights):
        lines.append(",".join(_fmt(x) for x in p) + f",{_fmt(w)}")
    return "\n".join(lines) + "\n"


def traces_csv(traces):
    """One row per (direction, sequence element): direction_id,n,distance."""
    lines = ["direction_id,n,distance"]
    for i, tr in enumerate(traces):
        for _, size, dist in tr.entries:
            lines.append(f"{i},{size},{_fmt(dist)}")
    return "\n".join(lines) + "\n"


def mixed_moments_csv(exponents, values):
    """Rows of alpha_1..alpha_d followed by the moment value."""
    d = len(exponents[0])
    lines = [",".join(f"alpha{i + 1}" for i in range(d)) + ",value"]
    for alpha, val in zip(exponents, values):
        lines.append(",".join(str(int(a)) for a in alpha) + f",{_fmt(val)}")
    return "\n".join(lines) + "\n"
