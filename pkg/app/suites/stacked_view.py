"""app.suites.stacked_view

Free gauge equations recovered by treating the stacked gauge field as a
matter field.
"""

from __future__ import annotations

from app.contracts.models import CheckRecord
from app.contracts.suite_base import BaseSuite, SuiteContext
from app.gauge_lagrangian import QuadraticCoeffs, quadratic_gauge_lagrangian, stacked_view_consistency
from app.lie import LieAlgebraSpec
from app.suites.builders import gauge_field, option, random_points


class StackedViewSuite(BaseSuite):
    name = "appendix-a"

    def run(self, ctx: SuiteContext) -> list[CheckRecord]:
        cfg = ctx.config
        n = int(option(cfg, "gauge_n_dims", 3))
        backend = option(cfg, "backend", "exact")
        x = random_points(cfg, n, 1000)
        records: list[CheckRecord] = []
        for i, c in enumerate(option(cfg, "c_list", [2, 1])):
            alg = LieAlgebraSpec.unitary(int(c))
            G = quadratic_gauge_lagrangian(QuadraticCoeffs.identity(n), int(c))
            a = gauge_field(cfg, alg, n, 1010 + i)
            records.append(self.check(
                ctx, f"stacked_view[u({c})]", "stacked matter-field residual equals the dagger-stable gauge residual",
                stacked_view_consistency(G, a, x, backend), cfg.tol("stacked_view", 1e-8),
                detail={"n_dims": n, "backend": backend}))
        return records
