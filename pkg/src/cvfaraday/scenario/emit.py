"""CSV and JSON serialisation of protocol results and sweep tables."""

from __future__ import annotations

import csv
import io
import json
import math

from ..protocols import ProtocolResult, Table


def format_value(value) -> str:
    if isinstance(value, (bool,)):
        return "1" if value else "0"
    return f"{float(value):.17g}"


def _csv(header, rows) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue().encode("utf-8")


def _json_number(value):
    if isinstance(value, bool):
        return value
    value = float(value)
    return value if math.isfinite(value) else None


def state_dict(state) -> dict:
    return {
        "modes": [{"id": m.id, "kind": m.kind.value} for m in state.modes],
        "cov": state.cov.tolist(),
        "disp": state.disp.tolist(),
    }


def result_dict(result: ProtocolResult) -> dict:
    if result.final_state is None:
        out = {"modes": [], "cov": [], "disp": []}
    else:
        out = state_dict(result.final_state)
    out["records"] = [r.as_dict() for r in result.records]
    out["reports"] = {k: _json_number(v) for k, v in result.reports.items()}
    if result.snapshots:
        out["snapshots"] = {name: state_dict(s) for name, s in result.snapshots}
    return out


def emit(obj: ProtocolResult | Table, fmt: str = "csv") -> bytes:
    """Serialise a run result or a sweep table as ``csv`` or ``json`` bytes."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    if isinstance(obj, Table):
        if fmt == "csv":
            return _csv(obj.columns, obj.rows)
        rows = [[_json_number(v) for v in row] for row in obj.rows]
        return (json.dumps({"columns": obj.columns, "rows": rows}, indent=1) + "\n").encode()
    if fmt == "csv":
        return _csv(list(obj.reports), [list(obj.reports.values())] if obj.reports else [])
    return (json.dumps(result_dict(obj), indent=1) + "\n").encode()
