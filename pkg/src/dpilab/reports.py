"""Report containers and atomic report file writers.

JSON reports are nested and schema-versioned; CSV reports are flat, one row
per case.  Files are written to a temporary sibling and moved into place so
readers never observe a partial report.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass, field

__all__ = ["SCHEMA_VERSION", "InequalityReport", "write_json", "write_csv"]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class InequalityReport:
    """One evaluated inequality: lhs >= sum(rhs_terms), margin = lhs - sum."""

    lhs: float
    rhs_terms: tuple[float, ...]
    alphas: tuple[float, ...]
    margin: float
    equality: bool
    tolerance: float
    normalization: str | None = None
    notes: tuple[str, ...] = ()

    @property
    def rhs_total(self) -> float:
        return float(sum(self.rhs_terms))

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs_terms": list(self.rhs_terms),
            "alphas": list(self.alphas),
            "margin": self.margin,
            "equality": self.equality,
            "tolerance": self.tolerance,
            "normalization": self.normalization,
            "notes": list(self.notes),
        }


def _atomic_write(path: str, payload: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(document: dict, path: str) -> None:
    """Atomically write a schema-versioned JSON report."""
    body = dict(document)
    body.setdefault("schema", SCHEMA_VERSION)
    _atomic_write(path, json.dumps(body, indent=2, sort_keys=False) + "\n")


def write_csv(rows: list[dict], columns: list[str], path: str) -> None:
    """Atomically write flat case rows with a fixed column order."""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    _atomic_write(path, buffer.getvalue())
