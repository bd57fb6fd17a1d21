"""app.suites.covariance

Gauge covariance of the field strength, the right group action on gauge
fields, and transport of the first-order system.
"""

from __future__ import annotations

import numpy as np

from app.contracts.models import CheckRecord
from app.contracts.suite_base import BaseSuite, SuiteContext
from app.fields import (
    check_covariance,
    first_order_residual,
    gauge_transform_gauge,
    gauge_transform_matter,
    random_gauge_config,
    random_group_field,
    random_smooth_field,
)
from app.lagrangian import standard_gammas
from app.lie import LieAlgebraSpec
from app.matcore import MatrixShape, max_frobenius
from app.suites.builders import option, rng_for
from app.sweep import sweep_max


def _algebra_for(instance: int, c: int) -> LieAlgebraSpec:
    if instance % 2 == 1 and c >= 2:
        return LieAlgebraSpec.by_j(np.diag([1.0] + [-1.0] + [1.0] * (c - 2)))
    return LieAlgebraSpec.unitary(c)


class CovarianceSuite(BaseSuite):
    name = "covariance"

    def run(self, ctx: SuiteContext) -> list[CheckRecord]:
        cfg = ctx.config
        instances = int(option(cfg, "instances", 20))
        dims = list(option(cfg, "n_dims_list", [2, 3, 4]))
        sizes = list(option(cfg, "c_list", [1, 2, 3]))
        count = int(option(cfg, "points", 50))
        amp = float(option(cfg, "amplitude", 0.5))

        covariance = action = transport = membership = 0.0
        for i in range(instances):
            n, c = dims[i % len(dims)], sizes[i % len(sizes)]
            alg = _algebra_for(i, c)
            rng = rng_for(cfg, 100, i)
            a = random_gauge_config(rng, alg, n, 2, amp)
            u = random_group_field(rng, alg, n, 1, amp)
            v = random_group_field(rng, alg, n, 1, amp)
            x = rng.uniform(0.0, cfg.grid.period, size=(count, n))

            covariance = max(covariance, check_covariance(a, u, x, ctx.workers))

            au = gauge_transform_gauge(a, u)
            twice = gauge_transform_gauge(au, v)
            once = gauge_transform_gauge(a, u @ v)
            action = max(action, sweep_max(
                lambda chunk: max(max_frobenius(twice[mu].values(chunk) - once[mu].values(chunk)) for mu in range(n)),
                x, ctx.workers))
            membership = max(membership, au.membership_defect(x))

            psi = random_smooth_field(rng, n, MatrixShape(2, c), 2, amp)
            gammas = standard_gammas(n, 2)
            mass = 1j * np.eye(2)
            lhs = first_order_residual(gauge_transform_matter(psi, u), au, gammas, mass)
            rhs = first_order_residual(psi, a, gammas, mass) @ u
            transport = max(transport, max_frobenius((lhs - rhs).values(x)))

        detail = {"instances": instances, "points": count}
        return [
            self.check(ctx, "field_strength_covariance", "field strength transforms by conjugation",
                       covariance, cfg.tol("covariance", 1e-10), detail=detail),
            self.check(ctx, "group_action_composition", "(A.U).V = A.(UV)",
                       action, cfg.tol("group_action", 1e-11), detail=detail),
            self.check(ctx, "transformed_gauge_membership", "A.U stays in the algebra",
                       membership, cfg.tol("membership", 1e-9), detail=detail),
            self.check(ctx, "first_order_transport", "residual(psi U, A.U) = residual(psi, A) U",
                       transport, cfg.tol("transport", 1e-9), detail=detail),
        ]
