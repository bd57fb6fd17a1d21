import json

import pytest

from app.errors import ConfigError, ValidationError
from app.paths import default_suite_config
from app.suite_config import build_suite_config, deep_merge, load_config_document, parse_override

DOC = {
    "defaults": {
        "seed": 42,
        "dims": {"n_dims": 2, "r": 2, "c": 2},
        "tolerances": {"membership": 1e-9},
        "options": {"amplitude": 0.5},
    },
    "suites": {"maxwell": {"seed": 3, "tolerances": {"lorenz": 1e-10}}},
}


def test_deep_merge_keeps_nested_keys():
    out = deep_merge({"a": {"x": 1, "y": 2}}, {"a": {"y": 3}})
    assert out == {"a": {"x": 1, "y": 3}}


def test_parse_override():
    assert parse_override("tolerances.trace=1e-11") == (["tolerances", "trace"], 1e-11)
    assert parse_override("algebra.kind=special_unitary") == (["algebra", "kind"], "special_unitary")
    with pytest.raises(ValidationError):
        parse_override("seed")


def test_suite_section_is_merged():
    cfg = build_suite_config(DOC, "maxwell")
    assert cfg.seed == 3
    assert cfg.tolerances == {"membership": 1e-9, "lorenz": 1e-10}
    assert build_suite_config(DOC, "covariance").seed == 42


def test_config_override_beats_sections():
    cfg = build_suite_config(DOC, "maxwell", ["seed=7", "options.amplitude=0.25"])
    assert cfg.seed == 7
    assert cfg.options["amplitude"] == 0.25


def test_document_override():
    cfg = build_suite_config(DOC, "maxwell", ["suites.maxwell.seed=9"])
    assert cfg.seed == 9
    assert build_suite_config(DOC, "noether", ["suites.maxwell.seed=9"]).seed == 42


def test_flux_kind_is_set():
    assert build_suite_config(DOC, "noether", flux_kind="translation").flux_kind == "translation"


def test_malformed_values():
    with pytest.raises(ValidationError):
        build_suite_config(DOC, "maxwell", ["seed=seven"])


def test_missing_document(tmp_path):
    with pytest.raises(ConfigError):
        load_config_document(str(tmp_path / "missing.json"))


def test_document_needs_defaults(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"suites": {}}), encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config_document(str(p))


def test_yaml_document(tmp_path):
    p = tmp_path / "suite.yaml"
    p.write_text("defaults:\n  seed: 5\n", encoding="utf-8")
    assert build_suite_config(load_config_document(str(p)), "covariance").seed == 5


def test_bundled_documents_agree():
    as_json = load_config_document(str(default_suite_config("json")))
    as_yaml = load_config_document(str(default_suite_config("yaml")))
    assert as_json == as_yaml
