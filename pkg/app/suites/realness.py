"""app.suites.realness

Realness of the induced functionals: pointwise for second-order densities,
up to a divergence for the first-order ones, plus the trace blocks that make
the gauged matter density real.
"""

from __future__ import annotations

from app.contracts.models import CheckRecord
from app.contracts.suite_base import BaseSuite, SuiteContext
from app.gauge_lagrangian import gauge_builtin, gauge_realness_defect, gauge_slot_dagger_defect
from app.lagrangian import gauged_density_blocks, realness_defect
from app.lie import LieAlgebraSpec
from app.suites.builders import grid, matter_field, option, rng_for
from app.suites.el_equivalence import DEFAULT_KINDS, build_kind


class RealnessSuite(BaseSuite):
    name = "realness"

    def run(self, ctx: SuiteContext) -> list[CheckRecord]:
        cfg = ctx.config
        records: list[CheckRecord] = []
        for i, kind in enumerate(option(cfg, "kinds", DEFAULT_KINDS)):
            L = build_kind(cfg, kind, 300 + i)
            psi = matter_field(cfg, L, 310 + i)
            rep = realness_defect(L, psi, grid(cfg, L.n_dims))
            detail = {"kind": kind, "mode": rep.mode}
            if rep.mode == "pointwise":
                records.append(self.check(
                    ctx, f"pointwise_realness[{kind}]", "density is real at every point",
                    rep.pointwise or 0.0, cfg.tol("pointwise", 1e-12), detail=detail))
                continue
            records.append(self.check(
                ctx, f"integral_realness[{kind}]", "torus integral of Im L vanishes",
                rep.integral, cfg.tol("integral", 1e-9), detail=detail))
            if rep.mode == "divergence":
                records.append(self.check(
                    ctx, f"divergence_slack[{kind}]", "L - conj L equals the divergence of the supplied slack",
                    rep.pointwise_fine or 0.0, cfg.tol("slack", 1.0),
                    order=rep.order, min_order=cfg.min_order,
                    detail={**detail, "coarse": rep.pointwise}))
            if L.name in ("dirac", "gauged_dirac"):
                blocks = gauged_density_blocks(L, rng_for(cfg, 320 + i), cfg.samples)
                records.append(self.check(
                    ctx, f"gauged_density_blocks[{kind}]", "kinetic, gauge and mass blocks of the gauged density",
                    max(blocks.values()), cfg.tol("blocks", 1e-12), detail={**detail, **blocks}))

        c = cfg.dims.c if cfg.dims.c > 1 else 2
        alg = LieAlgebraSpec.unitary(c)
        G = gauge_builtin("quadratic", {"c": c, "n_dims": 3})
        records.append(self.check(
            ctx, "gauge_realness[quadratic]", "quadratic gauge Lagrangian is real on algebra-valued arguments",
            gauge_realness_defect(G, alg, rng_for(cfg, 330), cfg.samples), cfg.tol("gauge_realness", 1e-12)))
        records.append(self.check(
            ctx, "gauge_slot_dagger[quadratic]", "starred gauge slots are daggers of the plain ones",
            gauge_slot_dagger_defect(G, alg, rng_for(cfg, 331), cfg.samples), cfg.tol("gauge_slot_dagger", 1e-8)))
        return records
