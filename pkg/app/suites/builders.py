"""app.suites.builders

Objects every suite builds from its config: seeded generators, the algebra,
the Lagrangian, grids and random fields.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from app.contracts.models import SuiteConfig
from app.fields import Grid, SmoothField, random_gauge_config, random_smooth_field
from app.lagrangian import ProtoLagrangian, builtin
from app.lie import LieAlgebraSpec, algebra_from_config
from app.matcore import MatrixShape


def rng_for(cfg: SuiteConfig, *salt: int) -> np.random.Generator:
    """Independent stream per (seed, salt...) so checks do not share draws."""
    return np.random.default_rng([cfg.seed, *salt])


def option(cfg: SuiteConfig, key: str, default: Any) -> Any:
    return cfg.options.get(key, default)


def algebra(cfg: SuiteConfig) -> LieAlgebraSpec:
    return algebra_from_config(cfg.algebra)


def lagrangian(cfg: SuiteConfig, **overrides: Any) -> ProtoLagrangian:
    params = {"n_dims": cfg.dims.n_dims, "r": cfg.dims.r, "c": cfg.dims.c, **cfg.lagrangian, **overrides}
    kind = params.pop("kind", "dirac")
    return builtin(kind, params)


def grid(cfg: SuiteConfig, n_dims: int | None = None) -> Grid:
    return Grid(n_dims or cfg.dims.n_dims, cfg.grid.points_per_axis, cfg.grid.period)


def random_points(cfg: SuiteConfig, n_dims: int, salt: int, count: int | None = None) -> np.ndarray:
    return rng_for(cfg, salt).uniform(0.0, cfg.grid.period, size=(count or cfg.samples, n_dims))


def matter_field(cfg: SuiteConfig, L: ProtoLagrangian, salt: int) -> SmoothField:
    return random_smooth_field(
        rng_for(cfg, salt),
        L.n_dims,
        MatrixShape(L.r, L.c),
        int(option(cfg, "max_mode", 1)),
        float(option(cfg, "amplitude", 0.5)),
        period=cfg.grid.period,
    )


def gauge_field(cfg: SuiteConfig, alg: LieAlgebraSpec, n_dims: int, salt: int):
    return random_gauge_config(
        rng_for(cfg, salt),
        alg,
        n_dims,
        int(option(cfg, "max_mode", 1)),
        float(option(cfg, "amplitude", 0.5)),
        cfg.grid.period,
    )
