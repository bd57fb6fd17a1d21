"""app.suites.el_equivalence

Holomorphic, conjugate and real-part Euler-Lagrange systems of the builtin
matter Lagrangians, plus the slot-level identities they rest on.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from app.contracts.models import CheckRecord, SuiteConfig
from app.contracts.suite_base import BaseSuite, SuiteContext
from app.lagrangian import (
    ProtoLagrangian,
    SlotPoint,
    conjugate_slot_relation_defect,
    el_equivalence,
    linearization_order,
    real_slot_conversion_defect,
    wirtinger_toy_defect,
)
from app.lie import LieAlgebraSpec, sample_algebra
from app.suites.builders import lagrangian, matter_field, option, random_points, rng_for

DEFAULT_KINDS = ["dirac", "gauged_dirac", "second_order", "schrodinger"]


def kind_params(cfg: SuiteConfig, kind: str, salt: int) -> dict[str, Any]:
    """Per-kind parameters; `gauged_dirac` gets J = diag(1, -1) and constant A in u(1, 1)."""
    params: dict[str, Any] = {"kind": kind, **option(cfg, "params", {}).get(kind, {})}
    if kind == "gauged_dirac" and "J" not in params:
        j = np.diag([1.0, -1.0])
        rng = rng_for(cfg, salt, 7)
        alg = LieAlgebraSpec.by_j(j)
        params.update({"c": 2, "J": j, "A": [0.5 * sample_algebra(alg, rng) for _ in range(cfg.dims.n_dims)]})
    return params


def build_kind(cfg: SuiteConfig, kind: str, salt: int) -> ProtoLagrangian:
    return lagrangian(cfg, **kind_params(cfg, kind, salt))


class ElEquivalenceSuite(BaseSuite):
    name = "el-equivalence"

    def run(self, ctx: SuiteContext) -> list[CheckRecord]:
        cfg = ctx.config
        records: list[CheckRecord] = []
        for i, kind in enumerate(option(cfg, "kinds", DEFAULT_KINDS)):
            L = build_kind(cfg, kind, 200 + i)
            psi = matter_field(cfg, L, 210 + i)
            x = random_points(cfg, L.n_dims, 220 + i)
            rep = el_equivalence(L, psi, x)
            detail = {"kind": kind, "norms": rep.norms}
            records.append(self.check(
                ctx, f"el_equivalence[{kind}]", "real-part residuals are linear in the holomorphic pair",
                rep.worst, cfg.tol("el_equivalence", 1e-8), detail=detail))
            records.append(self.check(
                ctx, f"conjugate_residual_relation[{kind}]", "conjugate residual is the dagger of the holomorphic one",
                conjugate_slot_relation_defect(L, psi, x), cfg.tol("dagger_relation", 1e-8), detail={"kind": kind}))

            sp = SlotPoint.random(rng_for(cfg, 230 + i), L.r, L.c, L.n_dims, cfg.samples)
            order = linearization_order(L, sp, rng_for(cfg, 240 + i))
            records.append(self.check(
                ctx, f"slot_linearization[{kind}]", "slots give the first-order change of the proto-Lagrangian",
                order, cfg.min_order, sense="min", detail={"kind": kind}))
            records.append(self.check(
                ctx, f"real_slot_conversion[{kind}]", "real-part partials from the holomorphic slot pair",
                real_slot_conversion_defect(L, sp), cfg.tol("real_slots", 1e-6), detail={"kind": kind}))

        records.append(self.check(
            ctx, "wirtinger_toy", "Wirtinger conversions for a real polynomial of (z, conj z)",
            wirtinger_toy_defect(rng_for(cfg, 250)), cfg.tol("wirtinger", 1e-7)))
        return records
