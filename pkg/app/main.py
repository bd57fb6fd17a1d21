"""app.main

Wiring for settings + logging + tracing + policy + suites + runner.
"""

from __future__ import annotations

from typing import Optional

from app.config import Settings
from app.env_loader import load_env
from app.logging_utils import build_logger
from app.orchestrator import SuiteRunner
from app.policy.tolerance_policy import TolerancePolicy
from app.tracing import TraceCollector

from app.suites.covariance import CovarianceSuite
from app.suites.el_equivalence import ElEquivalenceSuite
from app.suites.extensions import ExtensionsSuite
from app.suites.gauge_el import GaugeElSuite
from app.suites.maxwell import MaxwellSuite
from app.suites.noether import NoetherSuite
from app.suites.projections import ProjectionsSuite
from app.suites.realness import RealnessSuite
from app.suites.stacked_view import StackedViewSuite
from app.suites.trace_identities import TraceIdentitiesSuite

# run order of `all`: cheap algebra first, grid sweeps last
SUITE_CLASSES = [
    TraceIdentitiesSuite,
    ProjectionsSuite,
    CovarianceSuite,
    ElEquivalenceSuite,
    RealnessSuite,
    GaugeElSuite,
    MaxwellSuite,
    ExtensionsSuite,
    StackedViewSuite,
    NoetherSuite,
]


def build_runner(settings: Optional[Settings] = None, workers: Optional[int] = None) -> SuiteRunner:
    if settings is None:
        load_env()  # load .env if present
        settings = Settings.load()
    logger = build_logger(settings.log_dir)
    tracer = TraceCollector()
    policy = TolerancePolicy()

    suites = {cls.name: cls(policy, tracer, logger) for cls in SUITE_CLASSES}
    return SuiteRunner(
        suites=suites,
        policy=policy,
        tracer=tracer,
        logger=logger,
        workers=workers or settings.workers,
        order=[cls.name for cls in SUITE_CLASSES],
    )
