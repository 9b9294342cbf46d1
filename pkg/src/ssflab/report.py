"""Serialised experiment reports: CSV tables, a JSON document, figures.

Reports are deterministic given (config, seed): column orders are fixed,
floats are written with full repr precision, and the only run-dependent
content is the timings block of the JSON document.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path


@dataclass(frozen=True)
class Table:
    name: str
    columns: tuple
    rows: list


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


@dataclass
class Report:
    command: str
    config: dict
    tables: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add_table(self, name: str, columns, rows):
        self.tables.append(Table(name=name, columns=tuple(columns), rows=list(rows)))

    def add_check(self, name: str, passed: bool, detail: str = ""):
        self.checks.append(Check(name=name, passed=bool(passed), detail=detail))

    def payload(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "tables": [
                {
                    "name": t.name,
                    "columns": list(t.columns),
                    "rows": [[_jsonable(v) for v in row] for row in t.rows],
                }
                for t in self.tables
            ],
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks
            ],
            "passed": self.passed,
        }


def _jsonable(v):
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    return float(v)


def _format_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


class Timer:
    """Collects named wall-clock durations for the report's timings block."""

    def __init__(self):
        self.durations = {}

    def measure(self, name: str):
        timer = self

        class _Span:
            def __enter__(self):
                self.t0 = time.perf_counter()
                return self

            def __exit__(self, *exc):
                timer.durations[name] = timer.durations.get(name, 0.0) + (
                    time.perf_counter() - self.t0
                )
                return False

        return _Span()


def write_report(report: Report, out_dir: str, fmt: str = "csv") -> Path:
    """Write the report under ``out_dir`` and return the JSON document path.

    ``csv`` writes one file per table plus the JSON document; ``json`` embeds
    the tables in the document only.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        for t in report.tables:
            with open(out / f"{report.command}_{t.name}.csv", "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(t.columns)
                for row in t.rows:
                    writer.writerow([_format_cell(v) for v in row])
    doc = report.payload()
    doc["timings"] = {k: round(v, 6) for k, v in sorted(report.timings.items())}
    json_path = out / f"{report.command}_report.json"
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return json_path
