"""app.report

Serializes suite reports.

json is the canonical schema (sorted keys, non-finite floats as strings so the
document stays valid JSON); csv flattens one row per check; human is a
fixed-width table. Both tabular forms go through pandas.
"""

from __future__ import annotations

import json
import math
from typing import Any

import pandas as pd

from app.contracts.models import CheckRecord, OutputFormat, Report
from app.errors import UsageError

_COLUMNS = ["suite", "name", "anchor", "measured", "tolerance", "order", "min_order", "sense", "passed"]


def _clean(value: Any) -> Any:
    if isinstance(value, float):
        return value if math.isfinite(value) else str(value)
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if hasattr(value, "tolist"):
        return _clean(value.tolist())
    if isinstance(value, complex):
        return {"re": _clean(value.real), "im": _clean(value.imag)}
    return value


def check_to_dict(check: CheckRecord) -> dict[str, Any]:
    return {
        "name": check.name,
        "anchor": check.anchor,
        "measured": check.measured,
        "tolerance": check.tolerance,
        "order": check.order,
        "min_order": check.min_order,
        "sense": check.sense,
        "pass": check.passed,
        "detail": check.detail,
    }


def report_to_dict(report: Report, compare: bool = False) -> dict[str, Any]:
    """`compare` drops wall time so identical configs give identical bytes."""
    out: dict[str, Any] = {
        "suite": report.suite,
        "config": report.config,
        "checks": [check_to_dict(c) for c in report.checks],
        "pass": report.passed,
    }
    if not compare:
        out["wall_time"] = round(report.wall_time, 3)
    if report.traces is not None:
        out["trace"] = [{"step": t.step_name, "payload": t.payload} for t in report.traces]
    return _clean(out)


def report_frame(report: Report) -> pd.DataFrame:
    rows = [
        {
            "suite": report.suite,
            "name": c.name,
            "anchor": c.anchor,
            "measured": c.measured,
            "tolerance": c.tolerance,
            "order": c.order,
            "min_order": c.min_order,
            "sense": c.sense,
            "passed": c.passed,
        }
        for c in report.checks
    ]
    return pd.DataFrame(rows, columns=_COLUMNS)


def emit(report: Report, fmt: OutputFormat = "json", compare: bool = False) -> str:
    if fmt == "json":
        return json.dumps(report_to_dict(report, compare), indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        return report_frame(report).to_csv(index=False)
    if fmt == "human":
        frame = report_frame(report)
        verdict = "PASS" if report.passed else f"FAIL ({len(report.failures)} of {len(report.checks)} checks)"
        body = "(no checks)" if frame.empty else frame.drop(columns=["suite"]).to_string(index=False, float_format=lambda v: f"{v:.3e}")
        lines = [f"suite: {report.suite}", body, verdict]
        if not compare:
            lines.append(f"wall time: {report.wall_time:.2f} s")
        return "\n".join(lines) + "\n"
    raise UsageError(f"unknown output format '{fmt}'")
