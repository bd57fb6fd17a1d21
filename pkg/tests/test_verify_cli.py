import json

import pytest

from app.config import Settings
from app.logging_utils import LOG_FILE, build_logger
from app.errors import UsageError
from app.main import build_runner
from app.noether import FLUX_KINDS
from app.suite_config import load_config_document
from scripts.verify import EXIT_INVALID, EXIT_PASS, EXIT_USAGE, main

FAST = ["--set", "options.identity_samples=10", "--compare"]


@pytest.fixture(autouse=True)
def _log_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("VERIFY_LOG_DIR", str(tmp_path / "logs"))
    monkeypatch.setenv("VERIFY_ENV_FILE", str(tmp_path / "missing.env"))


def _runner(tmp_path):
    return build_runner(Settings(log_dir=str(tmp_path / "logs"), workers=1, output_format="json", debug=False))


def test_trace_identities_pass(tmp_path):
    out = tmp_path / "report.json"
    assert main(["trace-identities", *FAST, "--out", str(out)]) == EXIT_PASS
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert doc["pass"] is True
    assert doc["config"]["seed"] == 42
    assert "wall_time" not in doc


def test_reports_are_reproducible(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    main(["trace-identities", *FAST, "--out", str(first)])
    main(["trace-identities", *FAST, "--out", str(second)])
    assert first.read_bytes() == second.read_bytes()


def test_unknown_suite_is_a_usage_error():
    assert main(["chromodynamics"]) == EXIT_USAGE
    assert main(["noether-bogus"]) == EXIT_USAGE
    assert main(["covariance", "--kind", "translation"]) == EXIT_USAGE


def test_invalid_config_exit_code(tmp_path):
    assert main(["trace-identities", "--set", "refinement_levels=1"]) == EXIT_INVALID
    assert main(["trace-identities", "--config", str(tmp_path / "missing.json")]) == EXIT_INVALID


def test_resolve(tmp_path):
    runner = _runner(tmp_path)
    assert [s for s, _ in runner.resolve("all")] == runner.order
    assert runner.resolve("noether-gauge-dilation") == [("noether", "gauge_dilation")]
    assert runner.resolve("extend-dynamic") == [("extensions", None)]
    assert len(set(runner.names())) == len(runner.order) + len(FLUX_KINDS) + 3
    with pytest.raises(UsageError):
        runner.resolve("noether-spin")


def test_debug_embeds_traces(tmp_path):
    runner = _runner(tmp_path)
    report = runner.run("trace-identities", load_config_document(), ["options.identity_samples=5"], debug=True)
    steps = [t.step_name for t in report.traces]
    assert steps[0] == "suite.start"
    assert steps[-1] == "suite.finish"
    assert runner.tracer.for_step("suite.finish")[0]["failed"] == 0


def test_log_file_and_handlers(tmp_path):
    logger = build_logger(str(tmp_path / "run"), name="gauge_verify.log_file_test")
    assert build_logger(str(tmp_path / "other"), name="gauge_verify.log_file_test") is logger
    assert len(logger.handlers) == 2
    logger.info("suite covariance started (seed=%s)", 3)
    for h in logger.handlers:
        h.flush()
    text = (tmp_path / "run" / LOG_FILE).read_text(encoding="utf-8")
    assert "gauge_verify.log_file_test suite covariance started (seed=3)" in text
    assert not (tmp_path / "other").exists()
