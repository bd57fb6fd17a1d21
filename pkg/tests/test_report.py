import json

import pytest

from app.contracts.models import CheckRecord, Report, StepTrace
from app.errors import UsageError
from app.report import emit, report_to_dict


def _report(passed: bool = True) -> Report:
    checks = [
        CheckRecord("trace_identity[cyclic3]", "trace identity holds", 1e-15, 1e-12, True),
        CheckRecord("refused[x]", "refusal", float("inf"), 1e-8, passed, sense="min", detail={"message": "no"}),
    ]
    return Report("trace-identities", {"seed": 42}, checks, wall_time=1.234)


def test_empty_report_is_valid_json():
    doc = json.loads(emit(Report("noether", {}, [])))
    assert doc["pass"] is True
    assert doc["checks"] == []


def test_non_finite_values_stay_valid_json():
    doc = json.loads(emit(_report()))
    assert doc["checks"][1]["measured"] == "inf"
    assert doc["wall_time"] == 1.234


def test_compare_mode_drops_wall_time():
    assert "wall_time" not in report_to_dict(_report(), compare=True)
    assert emit(_report(), compare=True) == emit(_report(), compare=True)


def test_traces_are_embedded():
    rep = _report()
    rep.traces = [StepTrace("suite.start", {"suite": "trace-identities"})]
    assert report_to_dict(rep)["trace"][0]["step"] == "suite.start"


def test_csv_has_one_row_per_check():
    lines = emit(_report(), "csv").strip().splitlines()
    assert lines[0].startswith("suite,name,anchor")
    assert len(lines) == 3


def test_human_verdict():
    assert "PASS" in emit(_report(), "human")
    text = emit(_report(passed=False), "human", compare=True)
    assert "FAIL (1 of 2 checks)" in text
    assert "wall time" not in text


def test_unknown_format():
    with pytest.raises(UsageError):
        emit(_report(), "xml")  # type: ignore[arg-type]
