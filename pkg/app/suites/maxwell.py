"""app.suites.maxwell

Abelian Minkowski gauge equations against Maxwell's equations in potential
form, a plane-wave oracle, E/B fields and gauge shifts.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from app.contracts.models import CheckRecord
from app.contracts.suite_base import BaseSuite, SuiteContext
from app.fields import Field
from app.gauge_lagrangian import gauge_el_residual, minkowski_lagrangian
from app.maxwell import (
    N_DIMS,
    as_potential_form,
    eb_fields,
    gauge_shift,
    gauss_defect,
    lorenz_defect,
    magnetic_divergence,
    maxwell_defect,
    maxwell_potential_residual,
    potentials_to_gauge,
    random_potentials,
    random_real_scalar,
)
from app.matcore import max_frobenius
from app.oracles import maxwell_plane_wave, superposition
from app.suites.builders import option, random_points, rng_for


def _residual_norm(phi: Field, avec: Sequence[Field], x: np.ndarray) -> float:
    scalar, vector = maxwell_potential_residual(phi, avec, x)
    return float(max(np.max(np.abs(scalar)), np.max(np.abs(vector))))


class MaxwellSuite(BaseSuite):
    name = "maxwell"

    def run(self, ctx: SuiteContext) -> list[CheckRecord]:
        cfg = ctx.config
        amp = float(option(cfg, "amplitude", 0.5))
        x = random_points(cfg, N_DIMS, 500)
        records: list[CheckRecord] = []

        phi, avec = random_potentials(rng_for(cfg, 510), 2, amp)
        residuals = gauge_el_residual(minkowski_lagrangian(1), potentials_to_gauge(phi, avec), x, "dagger_stable", "exact")
        gauge_scalar, gauge_vector = as_potential_form(residuals)
        scalar, vector = maxwell_potential_residual(phi, avec, x)
        records.append(self.check(
            ctx, "potential_form_equivalence", "abelian Minkowski equations are Maxwell's in potential form",
            float(max(np.max(np.abs(gauge_scalar - scalar)), np.max(np.abs(gauge_vector - vector)))),
            cfg.tol("potential_form", 1e-10)))

        e, b = eb_fields(phi, avec)
        records.append(self.check(
            ctx, "magnetic_divergence", "div rot A = 0 for arbitrary potentials",
            magnetic_divergence(b, x), cfg.tol("magnetic_divergence", 1e-12)))

        lam = random_real_scalar(rng_for(cfg, 520), 2, amp)
        phi2, avec2 = gauge_shift(phi, avec, lam)
        e2, b2 = eb_fields(phi2, avec2)
        shift = max(
            max(max_frobenius(u.values(x) - v.values(x)) for u, v in zip(e, e2)),
            max(max_frobenius(u.values(x) - v.values(x)) for u, v in zip(b, b2)),
        )
        records.append(self.check(
            ctx, "gauge_shift_invariance", "gauge shifts leave E and B unchanged",
            shift, cfg.tol("gauge_shift", 1e-11)))

        waves = option(cfg, "waves", [[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], [[0.0, 2.0, 1.0], [1.0, 0.0, 0.0]]])
        pairs = [maxwell_plane_wave(k, eps, amp) for k, eps in waves]
        for i, (wphi, wavec) in enumerate(pairs):
            we, wb = eb_fields(wphi, wavec)
            detail = {"k": waves[i][0], "polarization": waves[i][1]}
            records.append(self.check(
                ctx, f"plane_wave_residual[{i}]", "transverse plane wave solves the potential form",
                _residual_norm(wphi, wavec, x), cfg.tol("plane_wave", 1e-10), detail=detail))
            records.append(self.check(
                ctx, f"plane_wave_lorenz[{i}]", "transverse plane wave satisfies the Lorenz gauge",
                lorenz_defect(wphi, wavec, x), cfg.tol("lorenz", 1e-10), detail=detail))
            records.append(self.check(
                ctx, f"plane_wave_eb[{i}]", "E and B of the plane wave satisfy the homogeneous equations",
                max(maxwell_defect(we, wb, x), gauss_defect(we, x)), cfg.tol("eb", 1e-10), detail=detail))

        sphi = superposition([p for p, _ in pairs])
        savec = [superposition([v[i] for _, v in pairs]) for i in range(3)]
        records.append(self.check(
            ctx, "plane_wave_superposition", "sums of plane waves stay solutions",
            _residual_norm(sphi, savec, x), cfg.tol("plane_wave", 1e-10)))
        return records
