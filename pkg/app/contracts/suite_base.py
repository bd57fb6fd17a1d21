"""app.contracts.suite_base

Base abstractions for verification suites and the shared run context.
"""

from __future__ import annotations
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Optional

from .models import CheckRecord, SuiteConfig


@dataclass
class SuiteContext:
    """Shared context passed to a suite."""
    config: SuiteConfig
    workers: int = 1
    checks: list[CheckRecord] = field(default_factory=list)
    last_error: Optional[str] = None


class BaseSuite(ABC):
    """Abstract suite interface.

    Subclasses measure defects and hand them to `check`, which applies the
    tolerance policy, logs and traces the record and appends it to the context.
    """

    name: str

    def __init__(self, policy, tracer, logger):
        self.policy = policy
        self.tracer = tracer
        self.logger = logger

    @abstractmethod
    def run(self, ctx: SuiteContext) -> list[CheckRecord]:
        """Run every check of this suite and return the records."""
        raise NotImplementedError

    def check(
        self,
        ctx: SuiteContext,
        name: str,
        anchor: str,
        measured: float,
        tolerance: float,
        order: Optional[float] = None,
        min_order: Optional[float] = None,
        sense: str = "max",
        detail: Optional[dict[str, Any]] = None,
    ) -> CheckRecord:
        violations = self.policy.evaluate(measured, tolerance, order, min_order, sense)
        rec = CheckRecord(
            name=name,
            anchor=anchor,
            measured=float(measured),
            tolerance=float(tolerance),
            passed=not violations,
            order=order,
            min_order=min_order,
            sense=sense,  # type: ignore[arg-type]
            detail={**(detail or {}), **({"violations": violations} if violations else {})},
        )
        ctx.checks.append(rec)
        self.tracer.add(self.name, {"check": name, "measured": rec.measured, "tolerance": rec.tolerance,
                                    "order": order, "passed": rec.passed})
        self.logger.info("%s %s measured=%.3e tol=%.1e pass=%s", self.name, name, rec.measured, rec.tolerance, rec.passed)
        if not rec.passed:
            self.logger.warning("%s %s failed: %s", self.name, name, "; ".join(violations))
        return rec
