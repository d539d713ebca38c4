"""Versioned JSON reports and columnar sweep exports.

Reports are deterministic: keys are sorted, floats use their shortest
round-trip representation, and no timestamps or environment data are
embedded, so identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = ["Report", "Record", "write_csv", "write_columns"]

REPORT_VERSION = 1


def _plain(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, float) and value != value:  # NaN -> null
        return None
    if isinstance(value, float) and value in (float("inf"), float("-inf")):
        return "inf" if value > 0 else "-inf"
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


@dataclass
class Record:
    """One named check with its anchor tag and outcome."""

    name: str
    anchor: str
    passed: bool
    values: dict = field(default_factory=dict)
    status: str = "converged"

    def to_json(self):
        return {
            "name": self.name,
            "anchor": self.anchor,
            "pass": bool(self.passed),
            "status": self.status,
            "values": _plain(self.values),
        }


@dataclass
class Report:
    command: str
    config: dict
    records: list = field(default_factory=list)
    version: int = REPORT_VERSION

    def add(self, record: Record):
        self.records.append(record)

    @property
    def passed(self):
        return all(r.passed for r in self.records)

    def summary(self):
        return {
            "checks": len(self.records),
            "passed": sum(1 for r in self.records if r.passed),
            "failed": sum(1 for r in self.records if not r.passed),
        }

    def to_json(self):
        return {
            "version": self.version,
            "command": self.command,
            "config": _plain(self.config),
            "records": [r.to_json() for r in self.records],
            "summary": self.summary(),
        }

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"

    def write(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())


def write_csv(path, header, rows):
    """Plain CSV with '.' decimals, no locale or quoting surprises."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
            fh.write("\n")


def write_columns(path, columns):
    """Columnar plot data: whitespace-separated x y ... rows."""
    arrays = [np.asarray(c, dtype=float) for c in columns]
    with open(path, "w", encoding="utf-8") as fh:
        for row in zip(*arrays):
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")
