"""app.oracles

Closed-form solutions used as on-shell references.

Each solution carries per-axis periods matching its wavevector, so a grid
built on `field.period` samples it periodically. Superpositions of modes with
unrelated frequencies lose that property; differentiate fluxes built from
them by stencils at shifted points.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
import numpy.typing as npt
from scipy import linalg

from app.errors import DimensionError, EvaluationError, ValidationError
from app.fields import Field, SmoothField
from app.matcore import MatrixShape, as_cmatrix, as_rng, random_cmatrix
from app.maxwell import N_DIMS

REAL_FREQUENCY_TOL = 1e-9
PLANE_WAVE_TOL = 1e-9


def _column_profile(rng: np.random.Generator, c: int) -> np.ndarray:
    w = random_cmatrix(rng, 1, c)[0]
    return w / np.linalg.norm(w)


def wave_period(wave: np.ndarray, default: float = 2 * np.pi) -> tuple[float, ...]:
    """Per-axis period on which the single mode exp(i wave . x) is periodic."""
    return tuple(default if abs(w) < 1e-12 else float(2 * np.pi / abs(w)) for w in wave)


def dirac_plane_wave(
    gammas: Sequence[npt.ArrayLike],
    mass: npt.ArrayLike,
    k_space: npt.ArrayLike,
    gauge: Sequence[npt.ArrayLike] | None = None,
    c: int | None = None,
    branch: int = 0,
) -> SmoothField:
    """psi = psi0 exp(i (w0 x0 + k . x)) with Gamma^mu (d_mu psi + psi A_mu) + M psi = 0
    for constant A_mu.

    On column-major vec psi the operator is
    T = sum_mu i k_mu (I (x) Gamma^mu) + sum_mu (A_mu^T (x) Gamma^mu) + I (x) M,
    and w0 solves the pencil T(0, k) v = w0 (-i I (x) Gamma^0) v. Only real
    branches are accepted, sorted ascending.
    """
    gs = [as_cmatrix(g) for g in gammas]
    n = len(gs)
    m = as_cmatrix(mass)
    r = m.shape[0]
    if gauge is None:
        cols = 1 if c is None else int(c)
        a_mats = [np.zeros((cols, cols), dtype=np.complex128)] * n
    else:
        a_mats = [as_cmatrix(a) for a in gauge]
        cols = a_mats[0].shape[0]
    if len(a_mats) != n:
        raise DimensionError(f"need {n} gauge matrices, got {len(a_mats)}")
    ks = np.asarray(k_space, dtype=float)
    if ks.shape != (n - 1,):
        raise DimensionError(f"need {n - 1} spatial wavenumbers, got {ks.shape}")
    eye = np.eye(cols)

    def operator(wave: np.ndarray) -> np.ndarray:
        t = np.kron(eye, m)
        for mu in range(n):
            t = t + 1j * wave[mu] * np.kron(eye, gs[mu]) + np.kron(a_mats[mu].T, gs[mu])
        return t

    lhs = operator(np.concatenate([[0.0], ks]))
    rhs = -1j * np.kron(eye, gs[0])
    vals, vecs = linalg.eig(lhs, rhs)
    real = [i for i, v in enumerate(vals) if np.isfinite(v) and abs(v.imag) < REAL_FREQUENCY_TOL]
    if not real:
        raise ValidationError(f"no propagating mode for k = {ks.tolist()} (frequencies {np.round(vals, 6).tolist()})")
    real.sort(key=lambda i: vals[i].real)
    if not 0 <= branch < len(real):
        raise ValidationError(f"branch {branch} out of range, {len(real)} real branches")
    idx = real[branch]
    v = vecs[:, idx] / np.linalg.norm(vecs[:, idx])
    wave = np.concatenate([[vals[idx].real], ks])
    residual = float(np.linalg.norm(operator(wave) @ v))
    if residual > PLANE_WAVE_TOL:
        raise EvaluationError(f"plane wave residual {residual:.3e} exceeds {PLANE_WAVE_TOL:.0e}")
    psi0 = v.reshape((r, cols), order="F")
    return SmoothField(wave[None, :], psi0[None], wave_period(wave))


def schrodinger_solution(
    potential: npt.ArrayLike,
    k_space: npt.ArrayLike,
    level: int = 0,
    c: int = 1,
    seed: int | np.random.Generator | None = 0,
) -> SmoothField:
    """psi = v w^T exp(i (k . x + w t)) with i psi_t + Lap psi + V psi = 0.

    v is the eigenvector of V for eigenvalue `level` (ascending) and w = lambda - |k|^2.
    """
    pot = as_cmatrix(potential)
    if np.max(np.abs(pot - pot.conj().T)) > 1e-12:
        raise ValidationError("the potential must be Hermitian")
    lam, vecs = linalg.eigh(pot)
    if not 0 <= level < len(lam):
        raise ValidationError(f"level {level} out of range for a {len(lam)}x{len(lam)} potential")
    ks = np.atleast_1d(np.asarray(k_space, dtype=float))
    omega = lam[level] - float(ks @ ks)
    w = _column_profile(as_rng(seed), c)
    wave = np.concatenate([[omega], ks])
    return SmoothField(wave[None, :], np.outer(vecs[:, level], w)[None], wave_period(wave))


def maxwell_plane_wave(
    k: npt.ArrayLike,
    polarization: npt.ArrayLike,
    amplitude: float = 1.0,
) -> tuple[SmoothField, list[SmoothField]]:
    """phi = 0, A = amplitude eps cos(k . x - |k| t) with eps orthogonal to k."""
    kv = np.asarray(k, dtype=float)
    eps = np.asarray(polarization, dtype=float)
    if kv.shape != (3,) or eps.shape != (3,):
        raise DimensionError("wavevector and polarization are 3-vectors")
    norm = float(np.linalg.norm(kv))
    if norm == 0.0:
        raise ValidationError("wavevector must be nonzero")
    if abs(float(kv @ eps)) > 1e-12 * norm * max(1.0, float(np.linalg.norm(eps))):
        raise ValidationError("polarization must be orthogonal to the wavevector")
    wave = np.concatenate([[-norm], kv])
    waves = np.vstack([wave, -wave])
    phi = SmoothField.zero(N_DIMS, MatrixShape(1, 1))
    avec = []
    for e in eps:
        half = 0.5 * amplitude * e
        avec.append(SmoothField(waves, np.full((2, 1, 1), half, dtype=np.complex128), None))
    return phi, avec


def superposition(fields: Sequence[Field], weights: Sequence[complex] | None = None) -> Field:
    """sum w_i psi_i; solutions of a linear equation stay solutions."""
    if not fields:
        raise ValidationError("superposition needs at least one field")
    ws = [1.0] * len(fields) if weights is None else list(weights)
    if len(ws) != len(fields):
        raise DimensionError(f"{len(fields)} fields but {len(ws)} weights")
    out: Field = fields[0] * ws[0]
    for f, w in zip(fields[1:], ws[1:]):
        out = out + f * w
    return out
