"""CSV / JSON serialisation with exact, shortest round-trip numbers."""
from __future__ import annotations

import csv
import io
import json
import math

import numpy as np


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, complex):
        return {"re": _jsonable(value.real), "im": _jsonable(value.imag)}
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value


def json_text(document) -> str:
    return json.dumps(_jsonable(document), indent=2, sort_keys=True, allow_nan=False) + "\n"


def csv_text(header: list[str], rows, comments: dict | None = None) -> str:
    """CSV with optional leading ``# key: json`` comment lines and a header row."""
    buffer = io.StringIO()
    for key, value in (comments or {}).items():
        buffer.write(f"# {key}: {json.dumps(_jsonable(value), sort_keys=True)}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buffer.getvalue()


def table_json(header: list[str], rows, comments: dict | None = None) -> str:
    records = [dict(zip(header, row)) for row in rows]
    document = dict(comments or {})
    document["rows"] = records
    return json_text(document)
