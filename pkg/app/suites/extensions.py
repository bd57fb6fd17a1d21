"""app.suites.extensions

Static and dynamic gauge extensions of matter Lagrangians: local invariance,
the extended Euler-Lagrange equations and the current condition that the
dynamic extension needs.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from app.contracts.models import CheckRecord, SuiteConfig
from app.contracts.suite_base import BaseSuite, SuiteContext
from app.errors import PreconditionError
from app.fields import random_group_field, zero_gauge_config
from app.gauge_lagrangian import (
    QuadraticCoeffs,
    current_condition_defect,
    dynamic_el,
    extended_el_matter,
    gauge_el_residual,
    global_invariance_defect,
    local_invariance_defect,
    quadratic_gauge_lagrangian,
    second_order_kappa_residual,
    static_extension,
)
from app.lagrangian import ProtoLagrangian, density
from app.lie import LieAlgebraSpec, ortho_project
from app.matcore import dagger, max_frobenius
from app.suites.builders import gauge_field, lagrangian, matter_field, option, random_points, rng_for

J_SPLIT = np.diag([1.0, -1.0])


def _cases(cfg: SuiteConfig, n: int) -> dict[str, tuple[ProtoLagrangian, LieAlgebraSpec]]:
    base: dict[str, Any] = {"n_dims": n, "r": 2, "c": 2}
    return {
        "dirac/u(2)": (lagrangian(cfg, kind="dirac", **base), LieAlgebraSpec.unitary(2)),
        "nonlinear_dirac/u(2)": (lagrangian(cfg, kind="dirac", nonlinear=1.0, **base), LieAlgebraSpec.unitary(2)),
        "gauged_dirac/u(1,1)": (lagrangian(cfg, kind="gauged_dirac", J=J_SPLIT, **base), LieAlgebraSpec.by_j(J_SPLIT)),
        "second_order/u(2)": (lagrangian(cfg, kind="second_order", **base), LieAlgebraSpec.unitary(2)),
    }


class ExtensionsSuite(BaseSuite):
    name = "extensions"

    def run(self, ctx: SuiteContext) -> list[CheckRecord]:
        cfg = ctx.config
        n = int(option(cfg, "extension_n_dims", 3))
        amp = float(option(cfg, "amplitude", 0.5))
        x = random_points(cfg, n, 700)
        records: list[CheckRecord] = []

        for i, (label, (L, alg)) in enumerate(_cases(cfg, n).items()):
            psi = matter_field(cfg, L, 710 + i)
            a = gauge_field(cfg, alg, n, 720 + i)
            u = random_group_field(rng_for(cfg, 730 + i), alg, n, 1, amp)
            records.append(self.check(
                ctx, f"local_invariance[{label}]", "statically extended density is invariant under local gauge transforms",
                local_invariance_defect(L, psi, a, u, x, rng_for(cfg, 740 + i)), cfg.tol("local_invariance", 1e-10)))

            if i == 0:
                plain = density(L, psi, x).value
                extended = static_extension(L, psi, zero_gauge_config(alg, n), x).value
                records.append(self.check(
                    ctx, "static_extension_zero_gauge", "extension by A = 0 is the ordinary density",
                    float(np.max(np.abs(plain - extended))), cfg.tol("zero_gauge", 1e-13)))

            ext = extended_el_matter(L, psi, a, x, "exact")
            if L.name == "dirac" and not L.params["nonlinear"]:
                psi_v = psi.values(x)
                gammas = L.params["gammas"]
                expected = [ortho_project(alg, -1j * dagger(psi_v) @ g @ psi_v) for g in gammas]
                records.append(self.check(
                    ctx, f"dirac_gauge_equation[{label}]", "gauge equation of the extended Dirac density is the projected current",
                    max(max_frobenius(e - f) for e, f in zip(ext.gauge, expected)), cfg.tol("extended", 1e-10)))
                records.append(self.check(
                    ctx, f"complex_structure_split[{label}]", "i swaps the algebra and its complement",
                    ext.split_defect(), cfg.tol("extended", 1e-10)))
            if L.name == "second_order":
                records.append(self.check(
                    ctx, f"qj_gauge_equation[{label}]", "involutive J turns the gauge equation into the Q_J form",
                    ext.qj_defect() or 0.0, cfg.tol("extended", 1e-10)))
                kappa = second_order_kappa_residual(L, psi, a, x)
                records.append(self.check(
                    ctx, f"second_order_kappa[{label}]", "algebraic gauge equation of the second-order density",
                    max(max_frobenius(q - k) for q, k in zip(ext.qj or [], kappa)), cfg.tol("kappa", 1e-8)))

        records.extend(self._probes(ctx, n, x))
        records.extend(self._dynamic(ctx, n, x))
        return records

    def _probes(self, ctx: SuiteContext, n: int, x: np.ndarray) -> list[CheckRecord]:
        cfg = ctx.config
        alg = LieAlgebraSpec.unitary(2)
        dirac = lagrangian(cfg, kind="dirac", n_dims=n, r=2, c=2)
        probe = lagrangian(cfg, kind="quartic_probe", n_dims=n, r=2, c=2)
        records = [
            self.check(
                ctx, "global_invariance[dirac]", "Dirac density is invariant under constant U in U(2)",
                global_invariance_defect(dirac, alg, rng_for(cfg, 750))[0], cfg.tol("global_invariance", 1e-9)),
            self.check(
                ctx, "global_invariance[quartic_probe]", "quartic probe is not invariant",
                global_invariance_defect(probe, alg, rng_for(cfg, 751))[0], cfg.tol("probe", 1e-4), sense="min"),
        ]
        psi = matter_field(cfg, probe, 752)
        a = gauge_field(cfg, alg, n, 753)
        u = random_group_field(rng_for(cfg, 754), alg, n, 1, float(option(cfg, "amplitude", 0.5)))
        try:
            local_invariance_defect(probe, psi, a, u, x, rng_for(cfg, 755))
            refused = 0.0
        except PreconditionError as exc:
            refused = exc.defect or 0.0
        records.append(self.check(
            ctx, "local_invariance_refused[quartic_probe]", "local invariance check refuses a non-invariant density",
            refused, cfg.tol("probe", 1e-4), sense="min"))
        return records

    def _dynamic(self, ctx: SuiteContext, n: int, x: np.ndarray) -> list[CheckRecord]:
        cfg = ctx.config
        alg = LieAlgebraSpec.unitary(2)
        G = quadratic_gauge_lagrangian(QuadraticCoeffs.identity(n), 2)
        dirac = lagrangian(cfg, kind="dirac", n_dims=n, r=2, c=2)
        mismatched = lagrangian(cfg, kind="gauged_dirac", n_dims=n, r=2, c=2, J=J_SPLIT)
        records = [
            self.check(
                ctx, "current_condition[dirac]", "Dirac density satisfies the current condition for u(2)",
                current_condition_defect(dirac, alg, rng_for(cfg, 760)), cfg.tol("current_condition", 1e-9)),
        ]

        psi = matter_field(cfg, mismatched, 761)
        a = gauge_field(cfg, alg, n, 762)
        try:
            dynamic_el(mismatched, G, psi, a, x, "exact")
            refused = 0.0
        except PreconditionError as exc:
            refused = exc.defect or 0.0
        records.append(self.check(
            ctx, "current_condition_refused[gauged_dirac]", "dynamic extension refuses a density violating the current condition",
            refused, cfg.tol("current_violation", 1e-3), sense="min"))

        psi = matter_field(cfg, dirac, 763)
        dyn = dynamic_el(dirac, G, psi, a, x, "exact")
        ext = extended_el_matter(dirac, psi, a, x, "exact")
        stable = gauge_el_residual(G, a, x, "dagger_stable", "exact")
        assembly = max(
            max_frobenius(g - (e - 2 * dagger(s))) for g, e, s in zip(dyn.gauge, ext.gauge, stable)
        )
        records.append(self.check(
            ctx, "dynamic_gauge_equation[dirac]", "gauge equation is the matter current minus twice the free residual",
            assembly, cfg.tol("dynamic", 1e-9)))
        records.append(self.check(
            ctx, "dynamic_matter_equation[dirac]", "matter equations are those of the static extension",
            max_frobenius(dyn.matter - ext.matter), cfg.tol("dynamic", 1e-9)))

        pure = dynamic_el(lagrangian(cfg, kind="zero", n_dims=n, r=2, c=2), G, psi, a, x, "exact")
        records.append(self.check(
            ctx, "dynamic_pure_gauge", "without matter the gauge equation is the free one",
            max(max_frobenius(g + 2 * dagger(s)) for g, s in zip(pure.gauge, stable)), cfg.tol("dynamic", 1e-9)))
        return records
