"""app.suites.projections

Algebra of Q_J and of the orthogonal projection onto g, each positive
statement paired with a negative control where it holds only under a
condition on J or g.
"""

from __future__ import annotations

import numpy as np

from app.contracts.models import CheckRecord
from app.contracts.suite_base import BaseSuite, SuiteContext
from app.lie import (
    LieAlgebraSpec,
    complex_structure_defect,
    membership_defect,
    ortho_complement,
    ortho_project,
    q_j,
)
from app.matcore import dagger, max_frobenius, random_cmatrix, re_inner
from app.suites.builders import rng_for

HERMITIAN_J = np.diag([2.0, -1.0])
INVOLUTIVE_J = np.diag([1.0, -1.0])
NON_HERMITIAN_J = np.array([[1.0, 1.0], [0.0, 1.0]])


class ProjectionsSuite(BaseSuite):
    name = "projections"

    def run(self, ctx: SuiteContext) -> list[CheckRecord]:
        cfg = ctx.config
        rng = rng_for(cfg, 900)
        z = np.stack([random_cmatrix(rng, 2, 2) for _ in range(cfg.samples)])
        y = np.stack([random_cmatrix(rng, 2, 2) for _ in range(cfg.samples)])
        tol = cfg.tol("projection", 1e-10)
        control = cfg.tol("control", 1e-3)
        records: list[CheckRecord] = []

        def idempotency(j: np.ndarray) -> float:
            qz = q_j(j, z)
            return max_frobenius(q_j(j, qz) - qz)

        records.append(self.check(ctx, "qj_idempotent[hermitian]", "Q_J is idempotent for Hermitian J",
                                  idempotency(HERMITIAN_J), tol))
        records.append(self.check(ctx, "qj_idempotent[non_hermitian]", "Q_J is not idempotent otherwise",
                                  idempotency(NON_HERMITIAN_J), control, sense="min"))
        records.append(self.check(
            ctx, "qj_image", "Q_J maps into g_J for Hermitian J",
            membership_defect(LieAlgebraSpec.by_j(HERMITIAN_J), q_j(HERMITIAN_J, z)), tol))

        for label, j in (("identity", np.eye(2)), ("split", INVOLUTIVE_J)):
            records.append(self.check(
                ctx, f"projection_is_qj[{label}]", "orthogonal projection equals Q_J for J = J^dagger = J^-1",
                max_frobenius(ortho_project(LieAlgebraSpec.by_j(j), z) - q_j(j, z)), tol))
        records.append(self.check(
            ctx, "projection_is_qj[non_involutive]", "they differ when J^2 is not the identity",
            max_frobenius(ortho_project(LieAlgebraSpec.by_j(HERMITIAN_J), z) - q_j(HERMITIAN_J, z)), control, sense="min"))

        stable = {"u(2)": LieAlgebraSpec.unitary(2), "u(1,1)": LieAlgebraSpec.by_j(INVOLUTIVE_J)}
        for label, alg in stable.items():
            pz, py = ortho_project(alg, z), ortho_project(alg, y)
            records.append(self.check(
                ctx, f"projection_self_adjoint[{label}]", "Re Tr[(Pi X)^+ Y] = Re Tr[X^+ Pi Y]",
                float(np.max(np.abs(re_inner(pz, y) - re_inner(z, py)))), tol))
            records.append(self.check(
                ctx, f"projection_orthogonal[{label}]", "image and complement are orthogonal",
                float(np.max(np.abs(re_inner(pz, ortho_complement(alg, y))))), tol))
            records.append(self.check(
                ctx, f"projection_dagger[{label}]", "projection commutes with dagger when g is dagger-stable",
                max_frobenius(ortho_project(alg, dagger(z)) - dagger(pz)), tol))
        skew = LieAlgebraSpec.by_j(HERMITIAN_J)
        records.append(self.check(
            ctx, "projection_dagger[non_stable]", "projection does not commute with dagger otherwise",
            max_frobenius(ortho_project(skew, dagger(z)) - dagger(ortho_project(skew, z))), control, sense="min"))

        records.append(self.check(
            ctx, "complex_structure[u(2)]", "Pi(iZ) = i Pi_perp(Z) for u(2)",
            complex_structure_defect(LieAlgebraSpec.unitary(2), rng_for(cfg, 902)), tol))
        records.append(self.check(
            ctx, "complex_structure[su(2)]", "fails for su(2)",
            complex_structure_defect(LieAlgebraSpec.special_unitary(2), rng_for(cfg, 903)), control, sense="min"))
        return records
