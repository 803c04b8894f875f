"""Deterministic JSON/CSV writers.

Floats are written with ``repr`` (shortest round-trip decimal), rows in a fixed
order, ``\\n`` line endings and no timestamps.  Identical inputs give
identical bytes.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return _finite(float(x))
    if isinstance(x, complex):
        return {"re": _finite(x.real), "im": _finite(x.imag)}
    return x


def _finite(v: float):
    return v if math.isfinite(v) else repr(v)


def report_document(inputs: dict, outputs: dict, warnings=()) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "inputs": _plain(inputs),
        "outputs": _plain(outputs),
        "warnings": list(warnings),
    }


def dumps_report(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def write_json(path, doc: dict) -> Path:
    path = Path(path)
    path.write_text(dumps_report(doc), encoding="utf-8")
    return path


def format_cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(format_cell(c) for c in row) for row in rows]
    return "\n".join(lines) + "\n"


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(header, rows))
    return path


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]
