"""Flat-file emission: versioned CSV and JSON with round-trip-safe floats."""

from __future__ import annotations

import json
import math
import os
from pathlib import Path

SCHEMA_VERSION = 1


def format_float(x) -> str:
    """17 significant digits: enough to round-trip any double."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def write_csv(path: Path, schema_name: str, columns, rows) -> Path:
    """Write rows atomically; the header comment line carries the schema tag."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    ncol = len(columns)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w") as fh:
        fh.write(f"# schema={schema_name}-v{SCHEMA_VERSION} columns={ncol}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            if len(row) != ncol:
                tmp.unlink(missing_ok=True)
                raise ValueError(f"row has {len(row)} fields, schema {schema_name} has {ncol}")
            fh.write(",".join(c if isinstance(c, str) else format_float(c) for c in row) + "\n")
    os.replace(tmp, path)
    return path


def write_json(path: Path, schema_name: str, columns, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    ncol = len(columns)
    payload_rows = []
    for row in rows:
        if len(row) != ncol:
            raise ValueError(f"row has {len(row)} fields, schema {schema_name} has {ncol}")
        payload_rows.append([c if isinstance(c, str) else float(c) for c in row])
    payload = {
        "schema": f"{schema_name}-v{SCHEMA_VERSION}",
        "columns": list(columns),
        "rows": payload_rows,
    }
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)
    return path


def write_table(path: Path, fmt: str, schema_name: str, columns, rows) -> Path:
    if fmt == "csv":
        return write_csv(path, schema_name, columns, rows)
    if fmt == "json":
        return write_json(path, schema_name, columns, rows)
    raise ValueError(f"unknown format {fmt!r}")
