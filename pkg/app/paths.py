"""app.paths

Locations of the bundled suite documents.

`scripts/verify.py` is started from arbitrary working directories, so these
are anchored at the package, never at the CWD.
"""

from __future__ import annotations

from pathlib import Path
from typing import Literal


def project_root() -> Path:
    return Path(__file__).resolve().parents[1]


def suites_dir() -> Path:
    """`data/suites`, holding `default.json` and its YAML mirror."""
    return project_root() / "data" / "suites"


def default_suite_config(fmt: Literal["json", "yaml"] = "json") -> Path:
    return suites_dir() / f"default.{fmt}"
