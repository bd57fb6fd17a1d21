"""app.suite_config

Loads suite configuration documents from repo `data/suites/`.

A document has a `defaults` section and optional per-suite sections under
`suites`; a suite's config is the deep merge of both. JSON is canonical,
YAML (`.yaml` / `.yml`) is accepted through pyyaml.

Overrides use `dotted.path=value`. Paths starting with `defaults.` or
`suites.` edit the document; any other path edits the merged config of
the suite being built, so `seed=7` wins over every section.
"""

from __future__ import annotations

import copy
import dataclasses
import json
from pathlib import Path
from typing import Any, Iterable, Optional

import yaml

from app.contracts.models import Dims, GridSpec, SuiteConfig
from app.errors import ConfigError, ValidationError
from app.paths import default_suite_config

_DOC_ROOTS = ("defaults", "suites")


def load_config_document(path: Optional[str] = None) -> dict[str, Any]:
    p = Path(path) if path else default_suite_config()
    if not p.is_file():
        raise ConfigError(f"suite config not found: {p}")
    text = p.read_text(encoding="utf-8")
    try:
        obj = yaml.safe_load(text) if p.suffix.lower() in (".yaml", ".yml") else json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigError(f"cannot parse {p}: {e}") from e
    if not isinstance(obj, dict) or "defaults" not in obj:
        raise ConfigError(f"{p} must be a mapping with a 'defaults' section")
    return obj


def deep_merge(base: dict[str, Any], extra: dict[str, Any]) -> dict[str, Any]:
    out = copy.deepcopy(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def parse_override(item: str) -> tuple[list[str], Any]:
    """`a.b=value` -> (["a", "b"], value); values parse as JSON, else stay strings."""
    if "=" not in item:
        raise ValidationError(f"override '{item}' must look like path=value")
    path, raw = item.split("=", 1)
    keys = [k for k in path.strip().split(".") if k]
    if not keys:
        raise ValidationError(f"override '{item}' has an empty path")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return keys, value


def _assign(obj: dict[str, Any], keys: list[str], value: Any) -> None:
    cur = obj
    for k in keys[:-1]:
        nxt = cur.get(k)
        if not isinstance(nxt, dict):
            nxt = {}
            cur[k] = nxt
        cur = nxt
    cur[keys[-1]] = value


def split_overrides(items: Iterable[str]) -> tuple[list[tuple[list[str], Any]], list[tuple[list[str], Any]]]:
    """(document overrides, merged-config overrides)."""
    doc_level, cfg_level = [], []
    for item in items:
        keys, value = parse_override(item)
        (doc_level if keys[0] in _DOC_ROOTS else cfg_level).append((keys, value))
    return doc_level, cfg_level


def apply_overrides(obj: dict[str, Any], overrides: Iterable[tuple[list[str], Any]]) -> dict[str, Any]:
    out = copy.deepcopy(obj)
    for keys, value in overrides:
        _assign(out, keys, value)
    return out


def merged_section(doc: dict[str, Any], suite: str) -> dict[str, Any]:
    section = (doc.get("suites") or {}).get(suite, {})
    if not isinstance(section, dict):
        raise ConfigError(f"suite section '{suite}' must be a mapping")
    return deep_merge(doc["defaults"], section)


def build_suite_config(
    doc: dict[str, Any],
    suite: str,
    overrides: Iterable[str] = (),
    flux_kind: Optional[str] = None,
) -> SuiteConfig:
    doc_level, cfg_level = split_overrides(overrides)
    merged = apply_overrides(merged_section(apply_overrides(doc, doc_level), suite), cfg_level)
    try:
        dims = merged.get("dims", {})
        grid = merged.get("grid", {})
        return SuiteConfig(
            suite=suite,
            seed=int(merged.get("seed", 0)),
            dims=Dims(int(dims.get("n_dims", 2)), int(dims.get("r", 2)), int(dims.get("c", 1))),
            grid=GridSpec(int(grid.get("points_per_axis", 16)), float(grid.get("period", 6.283185307179586))),
            algebra=dict(merged.get("algebra", {"kind": "unitary", "c": 1})),
            lagrangian=dict(merged.get("lagrangian", {"kind": "dirac"})),
            tolerances={k: float(v) for k, v in (merged.get("tolerances") or {}).items()},
            refinement_levels=int(merged.get("refinement_levels", 3)),
            samples=int(merged.get("samples", 20)),
            min_order=float(merged.get("min_order", 1.9)),
            flux_kind=flux_kind if flux_kind is not None else merged.get("flux_kind"),
            options=dict(merged.get("options", {})),
        )
    except (TypeError, ValueError, AttributeError) as e:
        raise ValidationError(f"malformed config for suite '{suite}': {e}") from e


def config_to_dict(cfg: SuiteConfig) -> dict[str, Any]:
    return dataclasses.asdict(cfg)
