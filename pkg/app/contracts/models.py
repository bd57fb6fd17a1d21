"""app.contracts.models

Shared models for the suite runner, suites, numerical modules and the CLI.
"""

from __future__ import annotations
from dataclasses import dataclass, field
from typing import Any, Literal, Optional

RealnessMode = Literal["pointwise", "divergence", "integral"]
GaugeVariant = Literal["general", "dagger_stable", "qj"]
OutputFormat = Literal["json", "csv", "human"]
DerivativeBackend = Literal["fd", "exact"]

FluxKind = Literal[
    "conserved_current",
    "translation",
    "dilation",
    "internal",
    "gauge_translation",
    "gauge_dilation",
    "gauge_internal",
    "combined",
]

SuiteName = Literal[
    "covariance",
    "el-equivalence",
    "realness",
    "gauge-el",
    "maxwell",
    "noether",
    "extensions",
    "trace-identities",
    "projections",
    "appendix-a",
]


@dataclass
class GridSpec:
    """Periodic sampling grid for divergence checks."""
    points_per_axis: int
    period: float


@dataclass
class Dims:
    """Field sizes: N space-time axes, psi is r x c, gauge matrices are c x c."""
    n_dims: int
    r: int
    c: int


@dataclass
class SuiteConfig:
    """Everything that can change a verdict; echoed into every report."""
    suite: str
    seed: int
    dims: Dims
    grid: GridSpec
    algebra: dict[str, Any]
    lagrangian: dict[str, Any]
    tolerances: dict[str, float]
    refinement_levels: int = 3
    samples: int = 20
    min_order: float = 1.9
    flux_kind: Optional[str] = None
    options: dict[str, Any] = field(default_factory=dict)

    def tol(self, key: str, default: float) -> float:
        return float(self.tolerances.get(key, default))


@dataclass
class CheckRecord:
    """One measured identity against its tolerance."""
    name: str
    anchor: str
    measured: float
    tolerance: float
    passed: bool
    order: Optional[float] = None
    min_order: Optional[float] = None
    # "max" checks pass when measured <= tolerance, "min" when measured > tolerance (negative controls)
    sense: Literal["max", "min"] = "max"
    detail: dict[str, Any] = field(default_factory=dict)


@dataclass
class StepTrace:
    """A single step trace for debug mode."""
    step_name: str
    payload: dict[str, Any]


@dataclass
class Report:
    """Final result of a suite run."""
    suite: str
    config: dict[str, Any]
    checks: list[CheckRecord]
    wall_time: float = 0.0
    traces: list[StepTrace] | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[CheckRecord]:
        return [c for c in self.checks if not c.passed]
