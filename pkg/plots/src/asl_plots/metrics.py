"""Reader for the asl-metrics-v1 CSV schema.

Files carry '#'-prefixed header comments, then a column row.  Numeric cells
use '.' decimals and may be empty when a run skipped that quantity.
"""

from __future__ import annotations

import csv
from pathlib import Path

BASELINE_IDS = ("full", "signs", "value_only", "distances")


class SchemaError(ValueError):
    """The CSV is missing a required column or contains no usable rows."""


def load_metrics(path: str | Path, required: tuple[str, ...]) -> list[dict]:
    """Rows with the ``required`` numeric columns parsed as floats.

    Rows with an empty value in a required column are dropped (e.g. specs
    whose control rollouts were not evaluated).  Raises `SchemaError` naming
    the first missing column, or when no complete row remains.
    """
    with open(path, newline="") as f:
        lines = [ln for ln in f if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    fields = reader.fieldnames or []
    for col in required:
        if col not in fields:
            raise SchemaError(f"{path}: missing required column {col!r}")
    rows = []
    for raw in reader:
        if any(raw[c] == "" for c in required):
            continue
        row = dict(raw)
        for c in required:
            row[c] = float(raw[c])
        rows.append(row)
    if not rows:
        raise SchemaError(f"{path}: no rows with all of {required}")
    return rows


def load_many(paths, required: tuple[str, ...]) -> list[dict]:
    """Concatenated rows from several CSVs (e.g. baselines + library)."""
    rows: list[dict] = []
    for p in paths:
        rows.extend(load_metrics(p, required))
    return rows


def split_out_stem(out: str | Path) -> Path:
    """--out accepts a stem or a .png/.svg path; figures go to stem.png/.svg."""
    p = Path(out)
    return p.with_suffix("") if p.suffix.lower() in (".png", ".svg") else p
