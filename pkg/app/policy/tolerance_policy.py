"""app.policy.tolerance_policy

Turns measurements into verdicts and validates suite configs.

Both entry points return violation lists; empty means pass / valid.
"""

from __future__ import annotations
import math
from typing import List, Optional

from app.contracts.models import SuiteConfig


class TolerancePolicy:
    """Evaluates measured defects against tolerances and convergence orders."""

    def evaluate(
        self,
        measured: float,
        tolerance: float,
        order: Optional[float] = None,
        min_order: Optional[float] = None,
        sense: str = "max",
    ) -> List[str]:
        violations: List[str] = []
        if math.isnan(measured):
            return ["measured value is NaN"]

        if sense == "max" and measured > tolerance:
            violations.append(f"measured {measured:.3e} exceeds tolerance {tolerance:.1e}")
        if sense == "min" and not measured > tolerance:
            violations.append(f"measured {measured:.3e} is not above {tolerance:.1e}")

        if min_order is not None:
            if order is None or math.isnan(order):
                violations.append("convergence order unavailable")
            elif order < min_order:
                violations.append(f"observed order {order:.2f} below {min_order:.2f}")
        return violations

    def validate_config(self, cfg: SuiteConfig) -> List[str]:
        violations: List[str] = []
        for key, value in cfg.tolerances.items():
            if not float(value) > 0:
                violations.append(f"tolerance '{key}' must be positive, got {value}")
        if cfg.refinement_levels < 2:
            violations.append(f"refinement_levels must be >= 2 for order checks, got {cfg.refinement_levels}")
        if cfg.samples < 1:
            violations.append(f"samples must be >= 1, got {cfg.samples}")
        if cfg.grid.points_per_axis < 4:
            violations.append(f"grid needs at least 4 points per axis, got {cfg.grid.points_per_axis}")
        if cfg.grid.period <= 0:
            violations.append(f"grid period must be positive, got {cfg.grid.period}")
        if min(cfg.dims.n_dims, cfg.dims.r, cfg.dims.c) < 1:
            violations.append("dims must be positive")
        if not 0 <= cfg.seed < 2**64:
            violations.append(f"seed must be a 64-bit unsigned integer, got {cfg.seed}")
        return violations
