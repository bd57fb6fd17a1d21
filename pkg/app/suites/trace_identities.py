"""app.suites.trace_identities

Random-sample checks of the matrix trace identities used by the flux
derivations.
"""

from __future__ import annotations

from app.contracts.models import CheckRecord
from app.contracts.suite_base import BaseSuite, SuiteContext
from app.matcore import IDENTITY_ARITY, random_cmatrix, trace_identity_defect
from app.suites.builders import option, rng_for


class TraceIdentitiesSuite(BaseSuite):
    name = "trace-identities"

    def run(self, ctx: SuiteContext) -> list[CheckRecord]:
        cfg = ctx.config
        samples = int(option(cfg, "identity_samples", 1000))
        sizes = list(option(cfg, "sizes", [2, 3, 4]))
        scale = float(option(cfg, "scale", 0.5))
        records: list[CheckRecord] = []
        for i, (kind, arity) in enumerate(sorted(IDENTITY_ARITY.items())):
            rng = rng_for(cfg, 800 + i)
            worst = 0.0
            for s in range(samples):
                n = sizes[s % len(sizes)]
                mats = [random_cmatrix(rng, n, n, scale) for _ in range(arity)]
                worst = max(worst, trace_identity_defect(kind, mats))  # type: ignore[arg-type]
            records.append(self.check(
                ctx, f"trace_identity[{kind}]", "trace identity holds for random complex matrices",
                worst, cfg.tol("trace", 1e-12), detail={"samples": samples, "sizes": sizes}))
        return records
