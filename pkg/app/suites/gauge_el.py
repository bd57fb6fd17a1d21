"""app.suites.gauge_el

Free gauge-field Euler-Lagrange equations: agreement of the residual
variants, the quadratic closed form and the Minkowski coefficient table.
"""

from __future__ import annotations

import numpy as np

from app.contracts.models import CheckRecord
from app.contracts.suite_base import BaseSuite, SuiteContext
from app.gauge_lagrangian import (
    GaugeSlotPoint,
    QuadraticCoeffs,
    gauge_el_residual,
    gauge_variant_agreement,
    numeric_gauge_slots,
    quadratic_closed_form_residual,
    quadratic_gauge_lagrangian,
)
from app.lie import LieAlgebraSpec
from app.matcore import max_frobenius
from app.suites.builders import algebra, gauge_field, option, random_points, rng_for


def _algebras(configured: LieAlgebraSpec) -> dict[str, LieAlgebraSpec]:
    c = configured.c
    out = {f"{configured.kind}({c})": configured}
    if configured.kind == "unitary" and c >= 2:
        out[f"u_J({c})"] = LieAlgebraSpec.by_j(np.diag([1.0, -1.0] + [1.0] * (c - 2)))
    return out


class GaugeElSuite(BaseSuite):
    name = "gauge-el"

    def run(self, ctx: SuiteContext) -> list[CheckRecord]:
        cfg = ctx.config
        n = int(option(cfg, "gauge_n_dims", 3))
        configured = algebra(cfg)
        c = configured.c
        h = QuadraticCoeffs.identity(n)
        G = quadratic_gauge_lagrangian(h, c)
        x = random_points(cfg, n, 400)
        records: list[CheckRecord] = []

        for i, (label, alg) in enumerate(_algebras(configured).items()):
            a = gauge_field(cfg, alg, n, 410 + i)
            agree = gauge_variant_agreement(G, a, x)
            detail = {"algebra": label, **agree}
            records.append(self.check(
                ctx, f"general_vs_dagger_stable[{label}]", "general residual collapses when g is dagger-stable",
                agree["general_vs_dagger_stable"], cfg.tol("variants", 1e-9), detail=detail))
            records.append(self.check(
                ctx, f"residual_membership[{label}]", "dagger-stable residual lies in the algebra",
                agree["membership"], cfg.tol("membership", 1e-9), detail=detail))
            if "qj_vs_dagger_stable" in agree:
                records.append(self.check(
                    ctx, f"qj_vs_dagger_stable[{label}]", "Q_J replaces the projection for involutive J",
                    agree["qj_vs_dagger_stable"], cfg.tol("variants", 1e-9), detail=detail))

            stable = gauge_el_residual(G, a, x, "dagger_stable", "exact")
            closed = quadratic_closed_form_residual(h, a, x)
            records.append(self.check(
                ctx, f"quadratic_closed_form[{label}]", "closed form of the quadratic gauge equations",
                max(max_frobenius(s - f) for s, f in zip(stable, closed)), cfg.tol("closed_form", 1e-9),
                detail={"algebra": label}))

            fd = gauge_el_residual(G, a, x, "dagger_stable", "fd")
            records.append(self.check(
                ctx, f"backend_agreement[{label}]", "finite-difference and jet derivatives agree",
                max(max_frobenius(s - f) for s, f in zip(stable, fd)), cfg.tol("backends", 1e-6),
                detail={"algebra": label}))

            sp = GaugeSlotPoint.random(alg, n, cfg.samples, rng_for(cfg, 420 + i))
            records.append(self.check(
                ctx, f"gauge_slot_formulas[{label}]", "analytic quadratic slots match numeric differentiation",
                G.slots(sp).distance(numeric_gauge_slots(G, sp), sp.batch), cfg.tol("slot_formulas", 1e-7),
                detail={"algebra": label}))

        mk = QuadraticCoeffs.minkowski()
        sign_defect = (
            abs(mk.coefficient((0, 1), (0, 1)) + 1)
            + abs(mk.coefficient((1, 2), (1, 2)) - 1)
            + float(np.max(np.abs(mk.h - np.diag(np.diag(mk.h)))))
        )
        records.append(self.check(
            ctx, "minkowski_coefficients", "time-space pairs carry sign -1, space-space pairs +1",
            sign_defect, cfg.tol("coefficients", 1e-15)))
        return records
