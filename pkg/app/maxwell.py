"""app.maxwell

Abelian gauge fields on Minkowski space in potential form.

Axis 0 is time t, axes 1..3 are x, y, z. Potentials are 1x1 fields on N=4:
a scalar potential phi and a vector potential (A_x, A_y, A_z). They map to a
gauge configuration in the full ambient algebra C through A_0^dagger = -phi and
A_i^dagger = A_i. All derivatives are exact.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
import numpy.typing as npt

from app.errors import DimensionError
from app.fields import Field, GaugeConfig, SmoothField, as_points, random_smooth_field
from app.lie import LieAlgebraSpec
from app.matcore import MatrixShape, as_rng

N_DIMS = 4


def check_potentials(phi: Field, avec: Sequence[Field]) -> None:
    if len(avec) != 3:
        raise DimensionError(f"vector potential needs 3 components, got {len(avec)}")
    for f in (phi, *avec):
        if f.n_dims != N_DIMS:
            raise DimensionError(f"potentials live on N=4, got N={f.n_dims}")
        if f.shape != MatrixShape(1, 1):
            raise DimensionError(f"potentials are scalar fields, got {f.shape.as_tuple()}")


def scalar_values(f: Field, points: npt.ArrayLike) -> np.ndarray:
    return f.values(points)[:, 0, 0]


def divergence(vec: Sequence[Field]) -> Field:
    return vec[0].partial(1) + vec[1].partial(2) + vec[2].partial(3)


def gradient(f: Field) -> list[Field]:
    return [f.partial(i) for i in (1, 2, 3)]


def curl(vec: Sequence[Field]) -> list[Field]:
    ax, ay, az = vec
    return [
        az.partial(2) - ay.partial(3),
        ax.partial(3) - az.partial(1),
        ay.partial(1) - ax.partial(2),
    ]


def laplacian(f: Field) -> Field:
    return f.partial(1).partial(1) + f.partial(2).partial(2) + f.partial(3).partial(3)


def maxwell_potential_residual(phi: Field, avec: Sequence[Field], points: npt.ArrayLike) -> tuple[np.ndarray, np.ndarray]:
    """(d_t div A + Lap phi, d_t^2 A - Lap A + grad(d_t phi + div A)); shapes (P,) and (P, 3)."""
    check_potentials(phi, avec)
    x = as_points(points, N_DIMS)
    div_a = divergence(avec)
    scalar = scalar_values(div_a.partial(0) + laplacian(phi), x)
    lorenz = phi.partial(0) + div_a
    vector = np.stack(
        [
            scalar_values(a.partial(0).partial(0) - laplacian(a) + lorenz.partial(i + 1), x)
            for i, a in enumerate(avec)
        ],
        axis=1,
    )
    return scalar, vector


def potentials_to_gauge(phi: Field, avec: Sequence[Field]) -> GaugeConfig:
    """A_0 = -phi^dagger, A_i = A_i^dagger."""
    check_potentials(phi, avec)
    comps = (-phi.dagger(),) + tuple(a.dagger() for a in avec)
    return GaugeConfig(LieAlgebraSpec.full_ambient(1), comps)


def as_potential_form(residuals: Sequence[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Map the four Minkowski gauge residuals to the potential-form pair.

    The time component carries over unchanged; the spatial ones flip sign.
    """
    if len(residuals) != N_DIMS:
        raise DimensionError(f"need 4 residual components, got {len(residuals)}")
    r = [np.asarray(v)[:, 0, 0] for v in residuals]
    return r[0], -np.stack(r[1:], axis=1)


def eb_fields(phi: Field, avec: Sequence[Field]) -> tuple[list[Field], list[Field]]:
    """E = -d_t A - grad phi, B = rot A."""
    check_potentials(phi, avec)
    grad_phi = gradient(phi)
    e = [-avec[i].partial(0) - grad_phi[i] for i in range(3)]
    return e, curl(avec)


def _vector_values(vec: Sequence[Field], x: np.ndarray) -> np.ndarray:
    return np.stack([scalar_values(v, x) for v in vec], axis=1)


def maxwell_defect(e: Sequence[Field], b: Sequence[Field], points: npt.ArrayLike) -> float:
    """max of |d_t B + rot E| and |d_t E - rot B| over the points."""
    x = as_points(points, N_DIMS)
    rot_e = _vector_values(curl(e), x)
    rot_b = _vector_values(curl(b), x)
    dt_b = _vector_values([v.partial(0) for v in b], x)
    dt_e = _vector_values([v.partial(0) for v in e], x)
    faraday = np.max(np.linalg.norm(dt_b + rot_e, axis=1))
    ampere = np.max(np.linalg.norm(dt_e - rot_b, axis=1))
    return float(max(faraday, ampere))


def magnetic_divergence(b: Sequence[Field], points: npt.ArrayLike) -> float:
    return float(np.max(np.abs(scalar_values(divergence(b), as_points(points, N_DIMS)))))


def gauss_defect(e: Sequence[Field], points: npt.ArrayLike) -> float:
    return float(np.max(np.abs(scalar_values(divergence(e), as_points(points, N_DIMS)))))


def lorenz_defect(phi: Field, avec: Sequence[Field], points: npt.ArrayLike) -> float:
    """max |d_t phi + div A|."""
    check_potentials(phi, avec)
    return float(np.max(np.abs(scalar_values(phi.partial(0) + divergence(avec), as_points(points, N_DIMS)))))


def gauge_shift(phi: Field, avec: Sequence[Field], lam: Field) -> tuple[Field, list[Field]]:
    """(phi - d_t L, A + grad L), which leaves E and B unchanged."""
    check_potentials(phi, avec)
    check_potentials(lam, avec)
    grad_l = gradient(lam)
    return phi - lam.partial(0), [a + g for a, g in zip(avec, grad_l)]


def random_real_scalar(
    seed: int | np.random.Generator | None,
    max_mode: int = 2,
    amplitude: float = 1.0,
    period: float | Sequence[float] = 2 * np.pi,
) -> SmoothField:
    """Real trigonometric scalar field on N=4."""
    f = random_smooth_field(seed, N_DIMS, MatrixShape(1, 1), max_mode, amplitude, period=period)
    return SmoothField(
        np.vstack([f.wavevectors, -f.wavevectors]),
        np.concatenate([0.5 * f.coeffs, 0.5 * np.conj(f.coeffs)]),
        f.period,
    )


def random_potentials(
    seed: int | np.random.Generator | None,
    max_mode: int = 2,
    amplitude: float = 1.0,
) -> tuple[SmoothField, list[SmoothField]]:
    rng = as_rng(seed)
    phi = random_real_scalar(rng, max_mode, amplitude)
    return phi, [random_real_scalar(rng, max_mode, amplitude) for _ in range(3)]
