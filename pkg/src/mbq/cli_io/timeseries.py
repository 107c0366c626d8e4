"""Diagnostics time-series CSV with round-trip float printing."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable

from ..diagnostics import CSV_FIELDS, DiagnosticsRecord, record_from_csv_row
from ..errors import ConfigError

HEADER = ",".join(CSV_FIELDS)


def _fmt(v) -> str:
    if isinstance(v, int):
        return str(v)
    return format(float(v), ".17g")


def format_row(r: DiagnosticsRecord) -> str:
    return ",".join(_fmt(v) for v in r.csv_values())


def write_timeseries(records: Iterable[DiagnosticsRecord], path) -> Path:
    """Write the header and one 17-significant-digit row per record."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        fh.write(HEADER + "\n")
        for r in records:
            fh.write(format_row(r) + "\n")
    return path


def read_timeseries(path) -> list[DiagnosticsRecord]:
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or ",".join(rows[0]) != HEADER:
        raise ConfigError(f"{path}: header does not match the time-series schema")
    out = []
    for k, row in enumerate(rows[1:], start=2):
        if len(row) != len(CSV_FIELDS):
            raise ConfigError(f"{path}:{k}: expected {len(CSV_FIELDS)} columns, got {len(row)}")
        out.append(record_from_csv_row([float(v) for v in row]))
    return out
