"""app.matcore

Dense complex matrix algebra shared by every other module.

All functions accept a single matrix or a stack of matrices (leading batch
axes, matrix axes last) so grid sweeps stay vectorized.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Literal, Sequence

import numpy as np
import numpy.typing as npt
from scipy import linalg

from app.errors import DimensionError, EvaluationError, ValidationError

CMatrix = npt.NDArray[np.complex128]

TraceIdentity = Literal["nested_commutator", "real_split", "twelve_term"]

IDENTITY_ARITY: dict[str, int] = {"nested_commutator": 4, "real_split": 3, "twelve_term": 4}


@dataclass(frozen=True)
class MatrixShape:
    rows: int
    cols: int

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ValidationError(f"matrix shape must be positive, got {self.rows}x{self.cols}")

    @staticmethod
    def of(m: npt.ArrayLike) -> "MatrixShape":
        a = np.asarray(m)
        if a.ndim < 2:
            raise DimensionError(f"expected a matrix, got array of ndim {a.ndim}")
        return MatrixShape(int(a.shape[-2]), int(a.shape[-1]))

    @property
    def transposed(self) -> "MatrixShape":
        return MatrixShape(self.cols, self.rows)

    def as_tuple(self) -> tuple[int, int]:
        return (self.rows, self.cols)


def as_cmatrix(m: npt.ArrayLike) -> CMatrix:
    """Coerce to a complex128 array with matrix axes last; rejects non-finite entries."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1:
        raise DimensionError("a one-dimensional array is ambiguous as a matrix; reshape it explicitly")
    if not np.all(np.isfinite(a)):
        raise EvaluationError("matrix has non-finite entries")
    return a


def random_cmatrix(rng: np.random.Generator, rows: int, cols: int, scale: float = 1.0) -> CMatrix:
    return scale * (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols)))


def dagger(m: Any) -> Any:
    """Hermitian transpose. Objects exposing `.dagger()` (fields, jets) dispatch to it."""
    if hasattr(m, "dagger") and not isinstance(m, np.ndarray):
        return m.dagger()
    a = np.asarray(m)
    if a.ndim < 2:
        raise DimensionError("dagger needs matrix axes")
    return np.conj(np.swapaxes(a, -1, -2))


def tr(m: npt.ArrayLike) -> Any:
    a = np.asarray(m)
    if a.shape[-1] != a.shape[-2]:
        raise DimensionError(f"trace of non-square matrix {a.shape[-2:]}")
    return np.trace(a, axis1=-2, axis2=-1)


def _check_square_pair(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[-2:] != b.shape[-2:] or a.shape[-1] != a.shape[-2]:
        raise DimensionError(f"need equal square shapes, got {a.shape[-2:]} and {b.shape[-2:]}")


def commutator(a: npt.ArrayLike, b: npt.ArrayLike) -> CMatrix:
    x = np.asarray(a)
    y = np.asarray(b)
    _check_square_pair(x, y)
    return x @ y - y @ x


def re_inner(x: npt.ArrayLike, y: npt.ArrayLike) -> Any:
    """Re Tr[x† y], the real inner product on complex matrices."""
    a = np.asarray(x)
    b = np.asarray(y)
    if a.shape[-2:] != b.shape[-2:]:
        raise DimensionError(f"re_inner shape mismatch {a.shape[-2:]} vs {b.shape[-2:]}")
    out = np.real(np.sum(np.conj(a) * b, axis=(-2, -1)))
    return float(out) if np.ndim(out) == 0 else out


def frobenius(x: npt.ArrayLike) -> Any:
    out = np.linalg.norm(np.asarray(x), axis=(-2, -1))
    return float(out) if np.ndim(out) == 0 else out


def max_frobenius(x: npt.ArrayLike) -> float:
    a = np.asarray(x)
    if a.size == 0:
        return 0.0
    return float(np.max(np.linalg.norm(a, axis=(-2, -1))))


def mat_exp(a: npt.ArrayLike) -> CMatrix:
    """Matrix exponential (Pade 13 with scaling and squaring)."""
    x = np.asarray(a, dtype=np.complex128)
    if x.ndim < 2 or x.shape[-1] != x.shape[-2]:
        raise DimensionError(f"mat_exp needs a square matrix, got shape {x.shape}")
    return linalg.expm(x)


def kron_left_right(left: npt.ArrayLike, right: npt.ArrayLike) -> CMatrix:
    """Matrix of X -> left @ X @ right acting on column-major vec(X)."""
    return np.kron(np.asarray(right).T, np.asarray(left))


def trace_identity_defect(kind: TraceIdentity, inputs: Sequence[npt.ArrayLike]) -> float:
    """|LHS - RHS| of one of the trace identities used in the flux proofs.

    nested_commutator (G, B, M, N):
        -Tr([M,G][B,N]) + Tr([N,G][B,M]) = Tr(G [B,[M,N]])
    real_split (X, Y, Z):
        Tr[XZ + YZ†] = Re Tr[(X†+Y)† Z] - i Re Tr[((X†-Y)/i)† Z]
    twelve_term (M, G, K, B):
        the alternating twelve-term product sum vanishes
    """
    if kind not in IDENTITY_ARITY:
        raise ValidationError(f"unknown trace identity '{kind}'")
    if len(inputs) != IDENTITY_ARITY[kind]:
        raise ValidationError(f"identity '{kind}' takes {IDENTITY_ARITY[kind]} matrices, got {len(inputs)}")
    mats = [np.asarray(m, dtype=np.complex128) for m in inputs]
    for m in mats[1:]:
        _check_square_pair(mats[0], m)

    if kind == "nested_commutator":
        g, b, m, n = mats
        lhs = -tr(commutator(m, g) @ commutator(b, n)) + tr(commutator(n, g) @ commutator(b, m))
        rhs = tr(g @ commutator(b, commutator(m, n)))
        return float(abs(lhs - rhs))

    if kind == "real_split":
        x, y, z = mats
        lhs = tr(x @ z + y @ dagger(z))
        rhs = re_inner(dagger(x) + y, z) - 1j * re_inner((dagger(x) - y) / 1j, z)
        return float(abs(lhs - rhs))

    m, g, k, b = mats
    total = tr(
        m @ g @ k @ b - g @ m @ k @ b - m @ g @ b @ k + g @ m @ b @ k
        - k @ g @ m @ b + g @ k @ m @ b + k @ g @ b @ m - g @ k @ b @ m
        + g @ m @ k @ b - g @ k @ m @ b - g @ b @ m @ k + g @ b @ k @ m
    )
    return float(abs(total))


def as_rng(seed: int | np.random.Generator | None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def matrix_from_json(obj: Any) -> CMatrix:
    """Parse a matrix from config JSON.

    Accepts `[[1, 0], [0, -1]]`, `{"re": [[..]], "im": [[..]]}`, or entries given
    as `[re, im]` pairs.
    """
    if isinstance(obj, dict):
        if "re" not in obj:
            raise ValidationError("matrix object needs an 're' part")
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
        if re.shape != im.shape:
            raise ValidationError(f"re/im parts differ in shape: {re.shape} vs {im.shape}")
        return as_cmatrix(re + 1j * im)
    raw = np.asarray(obj, dtype=float) if not _has_pairs(obj) else None
    if raw is not None:
        return as_cmatrix(raw if raw.ndim >= 2 else np.atleast_2d(raw))
    pairs = np.asarray(obj, dtype=float)
    if pairs.ndim != 3 or pairs.shape[-1] != 2:
        raise ValidationError("complex entries must be [re, im] pairs")
    return as_cmatrix(pairs[..., 0] + 1j * pairs[..., 1])


def matrix_to_json(m: npt.ArrayLike) -> dict[str, list[list[float]]]:
    a = np.asarray(m, dtype=np.complex128)
    return {"re": np.real(a).tolist(), "im": np.imag(a).tolist()}


def _has_pairs(obj: Any) -> bool:
    try:
        return isinstance(obj[0][0], (list, tuple))
    except (TypeError, IndexError, KeyError):
        return False
