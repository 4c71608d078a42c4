"""Machine-readable run reports.

Reports are plain JSON validated against REPORT_SCHEMA before they are
written, and serialized canonically (sorted keys, fixed indentation) so
that two runs with identical inputs produce byte-identical files apart
from the wall_time_s field.
"""
from __future__ import annotations

import json
import math
from typing import Any

import jsonschema

SCHEMA_VERSION = "meancert.report/1"

_DIGEST = {
    "type": "object",
    "properties": {
        "case": {"type": "string"},
        "kind": {"enum": ["scalar", "operator", "hs"]},
    },
    "required": ["case", "kind"],
}

_FAILURE = {
    "type": "object",
    "properties": {
        "digest": _DIGEST,
        "min_slack": {"type": "number"},
        "worst_link": {"type": "string"},
    },
    "required": ["digest", "min_slack"],
}

_CASE = {
    "type": "object",
    "properties": {
        "case": {"type": "string"},
        "kind": {"enum": ["scalar", "operator", "hs"]},
        "links": {"type": "array", "items": {"type": "string"}},
        "trials": {"type": "integer", "minimum": 0},
        "asserted": {"type": "integer", "minimum": 0},
        "passes": {"type": "integer", "minimum": 0},
        "failures": {"type": "integer", "minimum": 0},
        "skipped": {"type": "integer", "minimum": 0},
        "passed": {"type": "boolean"},
        "min_slack": {"type": ["number", "null"]},
        "argmin": {"type": ["object", "null"]},
        "failure_digests": {"type": "array", "items": _FAILURE},
        "oracle_max_rel_err": {"type": ["number", "null"]},
        "oracle_violations": {"type": "integer", "minimum": 0},
        "advisory_trials": {"type": "integer", "minimum": 0},
        "advisory_held": {"type": "integer", "minimum": 0},
    },
    "required": ["case", "kind", "trials", "passes", "failures", "passed",
                 "min_slack", "argmin", "failure_digests"],
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "tool": {"type": "string"},
        "command": {"enum": ["scalar-sweep", "matrix-verify"]},
        "config": {"type": "object"},
        "cases": {"type": "array", "items": _CASE},
        "all_passed": {"type": "boolean"},
        "wall_time_s": {"type": "number", "minimum": 0},
    },
    "required": ["schema", "tool", "command", "config", "cases",
                 "all_passed", "wall_time_s"],
    "additionalProperties": False,
}


def validate_report(report: dict[str, Any]) -> None:
    jsonschema.validate(report, REPORT_SCHEMA)


def _finite(value: Any) -> Any:
    """JSON has no NaN/inf; degrade them to strings rather than emit bad JSON."""
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(v) for v in value]
    return value


def build_report(command: str, config: dict[str, Any], cases: list[dict[str, Any]],
                 wall_time_s: float, tool: str) -> dict[str, Any]:
    report = {
        "schema": SCHEMA_VERSION,
        "tool": tool,
        "command": command,
        "config": _finite(config),
        "cases": _finite(sorted(cases, key=lambda c: c["case"])),
        "all_passed": all(c["passed"] for c in cases),
        "wall_time_s": float(wall_time_s),
    }
    validate_report(report)
    return report


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def strip_volatile(report: dict[str, Any]) -> dict[str, Any]:
    """Copy without timing fields, for byte-level comparisons across runs."""
    out = dict(report)
    out.pop("wall_time_s", None)
    return out
