"""app.lie

Real matrix Lie algebras g inside C^{c x c}.

Supported kinds:
- unitary(c):         X† + X = 0 (J = I)
- special_unitary(c): unitary and Tr X = 0
- byJ(J):             X†J + JX = 0
- fullAmbient(c):     all of C^{c x c}, used where no Lie structure is needed

The basis is computed once on construction: the defining real-linear
constraints are split into real and imaginary parts and solved with
scipy.linalg.null_space. The Euclidean product on [Re vec X, Im vec X]
is exactly Re Tr[X† Y], so the null-space basis is already orthonormal
under re_inner.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np
import numpy.typing as npt
from scipy import linalg

from app.errors import DimensionError, SingularMatrixError, ValidationError
from app.matcore import (
    CMatrix,
    as_cmatrix,
    as_rng,
    dagger,
    frobenius,
    mat_exp,
    matrix_from_json,
    matrix_to_json,
    random_cmatrix,
)

AlgebraKind = Literal["unitary", "special_unitary", "byJ", "fullAmbient"]


def _real_basis(c: int) -> list[CMatrix]:
    """Unit matrices E_ij followed by i*E_ij, matching the [Re, Im] split."""
    out: list[CMatrix] = []
    for part in (1.0, 1j):
        for k in range(c * c):
            e = np.zeros(c * c, dtype=np.complex128)
            e[k] = part
            out.append(e.reshape(c, c))
    return out


def _split(m: CMatrix) -> np.ndarray:
    return np.concatenate([np.real(m).ravel(), np.imag(m).ravel()])


def _solve_basis(c: int, j: CMatrix | None, trace_free: bool) -> CMatrix:
    units = _real_basis(c)
    rows: list[np.ndarray] = []
    if j is not None:
        # columns are images of the real unit directions
        rows.append(np.stack([_split(dagger(e) @ j + j @ e) for e in units], axis=1))
    if trace_free:
        rows.append(np.stack([[np.real(np.trace(e)), np.imag(np.trace(e))] for e in units], axis=1))
    if not rows:
        return np.stack(units)
    system = np.vstack(rows)
    null = linalg.null_space(system, rcond=1e-12)
    n = c * c
    basis = [(null[:n, k] + 1j * null[n:, k]).reshape(c, c) for k in range(null.shape[1])]
    if not basis:
        return np.zeros((0, c, c), dtype=np.complex128)
    return np.stack(basis)


@dataclass(frozen=True, eq=False)
class LieAlgebraSpec:
    kind: AlgebraKind
    c: int
    j: CMatrix | None = None
    basis: CMatrix = field(default=None, repr=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.c < 1:
            raise ValidationError(f"ambient size must be positive, got {self.c}")
        if self.j is not None and self.j.shape != (self.c, self.c):
            raise DimensionError(f"J must be {self.c}x{self.c}, got {self.j.shape}")
        if self.basis is None:
            trace_free = self.kind == "special_unitary"
            object.__setattr__(self, "basis", _solve_basis(self.c, self.j, trace_free))

    @staticmethod
    def unitary(c: int) -> "LieAlgebraSpec":
        return LieAlgebraSpec("unitary", c, np.eye(c, dtype=np.complex128))

    @staticmethod
    def special_unitary(c: int) -> "LieAlgebraSpec":
        return LieAlgebraSpec("special_unitary", c, np.eye(c, dtype=np.complex128))

    @staticmethod
    def by_j(j: npt.ArrayLike) -> "LieAlgebraSpec":
        jm = as_cmatrix(j)
        if jm.ndim != 2 or jm.shape[0] != jm.shape[1]:
            raise DimensionError(f"J must be square, got {jm.shape}")
        return LieAlgebraSpec("byJ", jm.shape[0], jm)

    @staticmethod
    def full_ambient(c: int) -> "LieAlgebraSpec":
        return LieAlgebraSpec("fullAmbient", c, None)

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    def describe(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind, "c": self.c, "dim": self.dim}
        if self.kind == "byJ" and self.j is not None:
            out["J"] = matrix_to_json(self.j)
        return out

    def combine(self, coeffs: npt.ArrayLike) -> CMatrix:
        """Real combination sum_k coeffs[..., k] E_k."""
        return np.einsum("...k,kij->...ij", np.asarray(coeffs, dtype=float), self.basis)

    def coordinates(self, x: npt.ArrayLike) -> np.ndarray:
        return np.real(np.einsum("kij,...ij->...k", np.conj(self.basis), np.asarray(x)))

    def project(self, x: npt.ArrayLike) -> CMatrix:
        return ortho_project(self, x)


@dataclass(frozen=True, eq=False)
class LieGroupSpec:
    algebra: LieAlgebraSpec

    @property
    def j(self) -> CMatrix | None:
        return self.algebra.j

    def contains(self, u: npt.ArrayLike, tol: float = 1e-11) -> bool:
        return group_defect(self, u) <= tol


def _check_square(spec: LieAlgebraSpec, x: np.ndarray) -> None:
    if x.shape[-2:] != (spec.c, spec.c):
        raise DimensionError(f"expected {spec.c}x{spec.c} matrices, got {x.shape[-2:]}")


def membership_defect(spec: LieAlgebraSpec, x: npt.ArrayLike) -> float:
    """Largest distance from g over a (possibly batched) input."""
    a = np.asarray(x, dtype=np.complex128)
    _check_square(spec, a)
    if spec.kind == "fullAmbient":
        return 0.0
    j = spec.j
    d = float(np.max(frobenius(dagger(a) @ j + j @ a)))
    if spec.kind == "special_unitary":
        d = max(d, float(np.max(np.abs(np.trace(a, axis1=-2, axis2=-1)))))
    return d


def is_in_algebra(spec: LieAlgebraSpec, x: npt.ArrayLike, tol: float = 1e-10) -> bool:
    return membership_defect(spec, x) <= tol


def q_j(j: npt.ArrayLike, x: npt.ArrayLike) -> CMatrix:
    """X -> (X - J^-1 X† J) / 2."""
    jm = np.asarray(j, dtype=np.complex128)
    xm = np.asarray(x, dtype=np.complex128)
    if xm.shape[-2:] != jm.shape:
        raise DimensionError(f"q_j shape mismatch: J {jm.shape}, X {xm.shape[-2:]}")
    if np.linalg.cond(jm) > 1e14:
        raise SingularMatrixError("J is singular; Q_J is undefined")
    return 0.5 * (xm - np.linalg.solve(jm, dagger(xm) @ jm))


def ortho_project(spec: LieAlgebraSpec, x: npt.ArrayLike) -> CMatrix:
    """Real-orthogonal projection onto g under Re Tr[X† Y]."""
    a = np.asarray(x, dtype=np.complex128)
    _check_square(spec, a)
    if spec.kind == "fullAmbient":
        return a.copy()
    return spec.combine(spec.coordinates(a))


def ortho_complement(spec: LieAlgebraSpec, x: npt.ArrayLike) -> CMatrix:
    a = np.asarray(x, dtype=np.complex128)
    return a - ortho_project(spec, a)


def dagger_stable(spec: LieAlgebraSpec, tol: float = 1e-10) -> bool:
    if spec.dim == 0:
        return True
    d = dagger(spec.basis)
    return float(np.max(frobenius(d - ortho_project(spec, d)))) <= tol


def complex_structure_defect(spec: LieAlgebraSpec, seed: int | np.random.Generator | None = 0, samples: int = 20) -> float:
    """Max ||Pi(iZ) - i Pi_perp(Z)|| over random Z; zero when multiplication by i swaps g and its complement."""
    rng = as_rng(seed)
    z = np.stack([random_cmatrix(rng, spec.c, spec.c) for _ in range(samples)])
    return float(np.max(frobenius(ortho_project(spec, 1j * z) - 1j * ortho_complement(spec, z))))


def complex_structure_compatible(spec: LieAlgebraSpec, tol: float = 1e-10) -> bool:
    return complex_structure_defect(spec) <= tol


def is_involutive_j(j: npt.ArrayLike, tol: float = 1e-12) -> bool:
    """J = J† = J^-1."""
    jm = np.asarray(j, dtype=np.complex128)
    eye = np.eye(jm.shape[0])
    return frobenius(jm - dagger(jm)) <= tol and frobenius(jm @ jm - eye) <= tol


def sample_algebra(spec: LieAlgebraSpec, seed: int | np.random.Generator | None) -> CMatrix:
    rng = as_rng(seed)
    if spec.dim == 0:
        return np.zeros((spec.c, spec.c), dtype=np.complex128)
    return spec.combine(rng.standard_normal(spec.dim))


def sample_group(group: LieGroupSpec, seed: int | np.random.Generator | None, scale: float = 1.0) -> CMatrix:
    if scale < 0:
        raise ValidationError(f"group sample scale must be non-negative, got {scale}")
    return mat_exp(scale * sample_algebra(group.algebra, seed))


def group_defect(group: LieGroupSpec, u: npt.ArrayLike) -> float:
    um = np.asarray(u, dtype=np.complex128)
    if group.algebra.kind == "fullAmbient":
        return 0.0 if np.all(np.abs(np.linalg.det(um)) > 1e-12) else float("inf")
    j = group.j
    return float(np.max(frobenius(dagger(um) @ j @ um - j)))


def algebra_from_config(obj: dict[str, Any]) -> LieAlgebraSpec:
    """Build an algebra from `{"kind": "unitary", "c": 2}` or `{"kind": "byJ", "J": [[..]]}`."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValidationError("algebra config needs a 'kind'")
    kind = obj["kind"]
    if kind == "byJ":
        if "J" not in obj:
            raise ValidationError("byJ algebra needs 'J'")
        return LieAlgebraSpec.by_j(matrix_from_json(obj["J"]))
    if "c" not in obj:
        raise ValidationError(f"{kind} algebra needs 'c'")
    c = int(obj["c"])
    if kind == "unitary":
        return LieAlgebraSpec.unitary(c)
    if kind == "special_unitary":
        return LieAlgebraSpec.special_unitary(c)
    if kind == "fullAmbient":
        return LieAlgebraSpec.full_ambient(c)
    raise ValidationError(f"unknown algebra kind '{kind}'")
