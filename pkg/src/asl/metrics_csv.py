"""Versioned CSV schema for per-representation metrics.

One row per representation; numeric fields are written with ``repr`` (full
round-trip double precision, '.' separator), empty string for quantities a
run did not compute.  Files start with comment lines

    # schema=asl-metrics-v1
    # config_hash=<sha256 of the canonical producing-config JSON>

followed by the column header.  Appending is idempotent per spec_id, which
makes long runs resumable; the config hash guards against resuming with a
different configuration.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

SCHEMA = "asl-metrics-v1"
COLUMNS = [
    "spec_id",
    "template",
    "delta_a",
    "delta_v",
    "i_az_sv",
    "i_ag_sv",
    "i_av_sz",
    "h_a_sg",
    "success_rate",
    "off_support_steps",
    "nll",
    "excess",
    "modeling_error",
    "iterations",
    "converged",
    "seed",
    "log_base",
]

LINE_SCHEMA = "asl-line-v1"
LINE_COLUMNS = ["phi", "distance_class", "success_rate", "delta_a", "delta_v", "i_az_sv"]


class SchemaError(ValueError):
    """CSV does not carry the expected schema or columns."""


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value + 0.0)  # normalizes -0.0
    return str(value)


def start_file(path: Path, cfg_hash: str, schema: str = SCHEMA, columns=None) -> None:
    columns = COLUMNS if columns is None else columns
    with open(path, "w", newline="") as f:
        f.write(f"# schema={schema}\n")
        f.write(f"# config_hash={cfg_hash}\n")
        csv.writer(f, lineterminator="\n").writerow(columns)


def append_row(path: Path, row: dict, columns=None) -> None:
    columns = COLUMNS if columns is None else columns
    with open(path, "a", newline="") as f:
        csv.writer(f, lineterminator="\n").writerow([format_cell(row.get(c)) for c in columns])


def read_file(path: Path) -> tuple[dict, list[dict]]:
    """(header metadata, rows as string dicts); raises SchemaError when malformed."""
    meta: dict[str, str] = {}
    with open(path, newline="") as f:
        pos = f.tell()
        while True:
            line = f.readline()
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    k, v = body.split("=", 1)
                    meta[k.strip()] = v.strip()
                pos = f.tell()
            else:
                f.seek(pos)
                break
        reader = csv.DictReader(f, lineterminator="\n")
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty metrics file")
        rows = list(reader)
    if "schema" not in meta:
        raise SchemaError(f"{path}: missing schema header")
    return meta, rows
