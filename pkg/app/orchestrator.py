"""app.orchestrator

Suite runner.

Resolves a suite name from the command line into one or more suite configs,
validates each config, runs the suites in order and assembles the report.

Names:
- a registered suite name runs that suite with its merged config section
- `noether-<kind>` runs the noether suite restricted to one flux kind
- `all` runs every registered suite and concatenates their checks
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional

from app.contracts.models import CheckRecord, Report, SuiteConfig
from app.contracts.suite_base import BaseSuite, SuiteContext
from app.errors import DimensionError, EvaluationError, PreconditionError, SingularMatrixError, UsageError, ValidationError
from app.noether import FLUX_KINDS
from app.policy.tolerance_policy import TolerancePolicy
from app.report import emit as emit_report
from app.suite_config import build_suite_config, config_to_dict
from app.tracing import TraceCollector

NOETHER_PREFIX = "noether-"

# operation-level names that run the whole extensions suite
ALIASES = {"extend-static": "extensions", "extend-dynamic": "extensions"}

# numerical failures inside a suite become a failed check, not a crash
_CHECK_ERRORS = (DimensionError, EvaluationError, PreconditionError, SingularMatrixError)


@dataclass
class SuiteRunner:
    suites: dict[str, BaseSuite]
    policy: TolerancePolicy
    tracer: TraceCollector
    logger: Any
    workers: int = 1
    order: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.order:
            self.order = list(self.suites)

    def _trace(self, step: str, payload: dict[str, Any]) -> None:
        try:
            self.tracer.add(step, payload)
        except Exception:
            pass

    def names(self) -> list[str]:
        return [*self.order, *(NOETHER_PREFIX + k for k in FLUX_KINDS), *ALIASES, "all"]

    def resolve(self, name: str) -> list[tuple[str, Optional[str]]]:
        """Suite name -> [(registered suite, flux kind)]."""
        name = ALIASES.get(name, name)
        if name == "all":
            return [(s, None) for s in self.order]
        if name.startswith(NOETHER_PREFIX):
            kind = name[len(NOETHER_PREFIX):].replace("-", "_")
            if kind not in FLUX_KINDS:
                raise UsageError(f"unknown flux kind '{kind}' (known: {', '.join(FLUX_KINDS)})")
            return [("noether", kind)]
        if name not in self.suites:
            raise UsageError(f"unknown suite '{name}' (known: {', '.join(self.names())})")
        return [(name, None)]

    def configs(self, name: str, doc: dict[str, Any], overrides: Iterable[str] = ()) -> list[SuiteConfig]:
        overrides = list(overrides)
        return [build_suite_config(doc, suite, overrides, flux_kind=kind) for suite, kind in self.resolve(name)]

    def run_suite(self, config: SuiteConfig) -> list[CheckRecord]:
        violations = self.policy.validate_config(config)
        if violations:
            raise ValidationError(f"invalid config for suite '{config.suite}': " + "; ".join(violations))
        suite = self.suites.get(config.suite)
        if suite is None:
            raise UsageError(f"unknown suite '{config.suite}'")

        ctx = SuiteContext(config=config, workers=self.workers)
        label = config.suite if config.flux_kind is None else f"{config.suite}-{config.flux_kind}"
        self.logger.info("suite %s started (seed=%s)", label, config.seed)
        self._trace("suite.start", {"suite": label, "seed": config.seed})
        start = time.perf_counter()
        try:
            suite.run(ctx)
        except _CHECK_ERRORS as e:
            ctx.last_error = str(e)
            self.logger.error("suite %s aborted: %s", label, e)
            ctx.checks.append(CheckRecord(
                name=f"{label}.aborted",
                anchor="suite raised before finishing its checks",
                measured=float("nan"),
                tolerance=0.0,
                passed=False,
                detail={"error": type(e).__name__, "message": str(e)},
            ))
        elapsed = time.perf_counter() - start
        failed = sum(not c.passed for c in ctx.checks)
        self.logger.info("suite %s finished: %d checks, %d failed, %.2f s", label, len(ctx.checks), failed, elapsed)
        self._trace("suite.finish", {"suite": label, "checks": len(ctx.checks), "failed": failed})
        return ctx.checks

    def run(self, name: str, doc: dict[str, Any], overrides: Iterable[str] = (), debug: bool = False) -> Report:
        self.tracer.clear()
        configs = self.configs(name, doc, overrides)
        # validate everything before running anything
        for cfg in configs:
            violations = self.policy.validate_config(cfg)
            if violations:
                raise ValidationError(f"invalid config for suite '{cfg.suite}': " + "; ".join(violations))

        start = time.perf_counter()
        checks: list[CheckRecord] = []
        for cfg in configs:
            checks.extend(self.run_suite(cfg))
        wall = time.perf_counter() - start

        if len(configs) == 1:
            echo = config_to_dict(configs[0])
        else:
            echo = {cfg.suite: config_to_dict(cfg) for cfg in configs}
        report = Report(suite=name, config=echo, checks=checks, wall_time=wall)
        report.traces = self.tracer.steps() if debug else None
        self.logger.info("run %s: %s in %.2f s", name, "PASS" if report.passed else "FAIL", wall)
        return report

    def emit(self, report: Report, fmt: str = "json", compare: bool = False) -> str:
        return emit_report(report, fmt, compare)  # type: ignore[arg-type]
