"""Structured run reports and their CSV/JSON serialisation.

A report is a plain dict with keys ``command``, ``inputs``, ``summary``,
``records``, ``verdicts``, ``errors``, ``version`` and, only when requested, ``timing``.
Floats are written with 17 significant digits; non-finite values become
``null`` in JSON and ``inf``/``-inf``/``nan`` in CSV.
"""

from __future__ import annotations

import csv
import io
import json
import math
from importlib import resources

SCHEMA_RESOURCE = "report.schema.json"


def new_report(command: str, inputs: dict, version: str) -> dict:
    return {"command": command, "inputs": inputs, "summary": {}, "records": [],
            "verdicts": [], "errors": [], "version": version}


def add_verdict(report: dict, name: str, passed: bool, margin: float | None = None) -> None:
    report["verdicts"].append({"name": name, "passed": bool(passed), "margin": margin})


def add_error(report: dict, exc: BaseException) -> None:
    report["errors"].append({"type": type(exc).__name__, "message": str(exc)})


def passed(report: dict) -> bool:
    return not report["errors"] and all(v["passed"] for v in report["verdicts"])


def _plain(value):
    """Convert numpy scalars and tuples so json and csv see builtin types."""
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    if hasattr(value, "item"):
        return _plain(value.item())
    if isinstance(value, float):
        return value
    return value


def _finite_only(value):
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: _finite_only(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_finite_only(v) for v in value]
    return value


def to_json(report: dict) -> str:
    # float repr is the shortest string that round-trips, i.e. full precision
    return json.dumps(_finite_only(_plain(report)), indent=2,
                      ensure_ascii=False, allow_nan=False) + "\n"


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if value is None:
        return ""
    return str(value)


def records_csv(records: list[dict]) -> str:
    """RFC-4180 CSV of the records; columns in first-seen key order."""
    columns: list[str] = []
    for rec in records:
        for key in rec:
            if key not in columns:
                columns.append(key)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\r\n")
    if columns:
        writer.writerow(columns)
    for rec in _plain(records):
        writer.writerow([_cell(rec.get(c)) for c in columns])
    return out.getvalue()


def load_schema() -> dict:
    text = resources.files(__package__).joinpath(SCHEMA_RESOURCE).read_text(encoding="utf-8")
    return json.loads(text)
