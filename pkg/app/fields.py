"""app.fields

Smooth matrix-valued fields on R^N with exact derivatives up to order two.

A field is evaluated as a `Jet` at a batch of points: the value, all first
partials and all second partials, stacked as

    value (P, r, c)    grad (N, P, r, c)    hess (N, N, P, r, c)

`SmoothField` is a finite Fourier sum whose partials are exact. `DerivedField`
combines fields with +, products, inverse, dagger, commutator and partials and
propagates jets through the product and inverse rules, so composite objects
like A⊣U are evaluated to machine precision. Finite differences are used only
for divergences of fluxes (see `grid_divergence` and `stencil_divergence`).
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np
import numpy.typing as npt
import pandas as pd

from app.errors import DimensionError, EvaluationError, ValidationError
from app.lie import LieAlgebraSpec, membership_defect
from app.matcore import CMatrix, MatrixShape, as_rng, max_frobenius
from app.sweep import sweep_max

MAX_DEPTH = 64
INVERSE_COND_LIMIT = 1e8
_CONST_ORDER = 99


@dataclass(frozen=True, eq=False)
class Jet:
    """Value and partials of a matrix field at a batch of points.

    A constant jet has no stored derivatives; they are zero at every order.
    """

    value: np.ndarray
    grad: np.ndarray | None = None
    hess: np.ndarray | None = None
    is_const: bool = False

    @property
    def order(self) -> int:
        if self.is_const:
            return _CONST_ORDER
        if self.hess is not None:
            return 2
        return 1 if self.grad is not None else 0

    @staticmethod
    def constant(value: npt.ArrayLike) -> "Jet":
        return Jet(np.asarray(value, dtype=np.complex128), is_const=True)

    def truncate(self, order: int) -> "Jet":
        if self.is_const:
            return self
        return Jet(self.value, self.grad if order >= 1 else None, self.hess if order >= 2 else None)

    def _map(self, fn: Callable[[np.ndarray], np.ndarray]) -> "Jet":
        return Jet(
            fn(self.value),
            None if self.grad is None else fn(self.grad),
            None if self.hess is None else fn(self.hess),
            self.is_const,
        )

    # numpy must hand mixed expressions back to the reflected methods below
    __array_ufunc__ = None

    def __neg__(self) -> "Jet":
        return self._map(np.negative)

    def __add__(self, other: Any) -> "Jet":
        return _linear(self, as_jet(other), 1.0)

    def __radd__(self, other: Any) -> "Jet":
        return _linear(as_jet(other), self, 1.0)

    def __sub__(self, other: Any) -> "Jet":
        return _linear(self, as_jet(other), -1.0)

    def __rsub__(self, other: Any) -> "Jet":
        return _linear(as_jet(other), self, -1.0)

    def __matmul__(self, other: Any) -> "Jet":
        return _bilinear(self, as_jet(other), np.matmul)

    def __rmatmul__(self, other: Any) -> "Jet":
        return _bilinear(as_jet(other), self, np.matmul)

    def __mul__(self, other: Any) -> "Jet":
        if np.isscalar(other):
            return self.scale(other)
        return _bilinear(self, as_jet(other), np.multiply)

    def __rmul__(self, other: Any) -> "Jet":
        if np.isscalar(other):
            return self.scale(other)
        return _bilinear(as_jet(other), self, np.multiply)

    def __truediv__(self, s: complex) -> "Jet":
        return self.scale(1.0 / s)

    def scale(self, s: complex) -> "Jet":
        return self._map(lambda a: s * a)

    def dagger(self) -> "Jet":
        return self._map(lambda a: np.conj(np.swapaxes(a, -1, -2)))

    def conj(self) -> "Jet":
        return self._map(np.conj)

    def mtrace(self) -> "Jet":
        return self._map(lambda a: np.trace(a, axis1=-2, axis2=-1)[..., None, None])

    def partial(self, mu: int) -> "Jet":
        if self.is_const:
            return Jet.constant(np.zeros_like(self.value))
        if self.grad is None:
            raise EvaluationError("partial derivative requested from an order-0 jet")
        return Jet(self.grad[mu], None if self.hess is None else self.hess[:, mu])

    def inverse(self, points: np.ndarray | None = None) -> "Jet":
        v = self.value
        if v.shape[-1] != v.shape[-2]:
            raise DimensionError(f"inverse of non-square field {v.shape[-2:]}")
        cond = np.linalg.cond(v.reshape((-1,) + v.shape[-2:]))
        if np.any(~np.isfinite(cond)) or np.any(cond > INVERSE_COND_LIMIT):
            idx = int(np.argmax(np.where(np.isfinite(cond), cond, np.inf)))
            where = None if points is None or self.is_const else points[idx].tolist()
            raise EvaluationError(f"ill-conditioned inverse (cond={cond.ravel()[idx]:.3e})", where)
        vi = np.linalg.inv(v)
        if self.is_const:
            return Jet.constant(vi)
        grad = hess = None
        if self.grad is not None:
            vg = vi[None] @ self.grad @ vi[None]
            grad = -vg
            if self.hess is not None:
                # a[mu, nu] = Vi V_nu Vi V_mu Vi
                a = vg[None, :] @ self.grad[:, None] @ vi[None, None]
                hess = a + np.swapaxes(a, 0, 1) - vi[None, None] @ self.hess @ vi[None, None]
        return Jet(vi, grad, hess)

    def check_finite(self, points: np.ndarray | None = None) -> "Jet":
        if np.all(np.isfinite(self.value)):
            return self
        bad = ~np.isfinite(self.value.reshape(len(self.value), -1)).all(axis=1)
        idx = int(np.argmax(bad))
        raise EvaluationError("non-finite field value", None if points is None else points[idx].tolist())


def as_jet(other: Any) -> Jet:
    return other if isinstance(other, Jet) else Jet.constant(other)


def _linear(a: Jet, b: Jet, sign: float) -> Jet:
    order = min(a.order, b.order)
    value = a.value + sign * b.value
    if a.is_const and b.is_const:
        return Jet.constant(value)

    def combine(x: np.ndarray | None, y: np.ndarray | None) -> np.ndarray:
        if x is None:
            return sign * y
        if y is None:
            return x
        return x + sign * y

    ag = None if a.is_const else a.grad
    bg = None if b.is_const else b.grad
    ah = None if a.is_const else a.hess
    bh = None if b.is_const else b.hess
    grad = combine(ag, bg) if order >= 1 else None
    hess = combine(ah, bh) if order >= 2 else None
    if grad is not None:
        grad = np.broadcast_to(grad, grad.shape[:1] + np.broadcast_shapes(grad.shape[1:], value.shape)).copy()
    if hess is not None:
        hess = np.broadcast_to(hess, hess.shape[:2] + np.broadcast_shapes(hess.shape[2:], value.shape)).copy()
    return Jet(value, grad, hess)


def _bilinear(a: Jet, b: Jet, f: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> Jet:
    order = min(a.order, b.order)
    value = f(a.value, b.value)
    if a.is_const and b.is_const:
        return Jet.constant(value)
    grad = hess = None
    if order >= 1:
        terms = []
        if not a.is_const:
            terms.append(f(a.grad, b.value[None]))
        if not b.is_const:
            terms.append(f(a.value[None], b.grad))
        grad = sum(terms[1:], terms[0])
    if order >= 2:
        terms = []
        if not a.is_const:
            terms.append(f(a.hess, b.value[None, None]))
        if not a.is_const and not b.is_const:
            terms.append(f(a.grad[:, None], b.grad[None, :]))
            terms.append(f(a.grad[None, :], b.grad[:, None]))
        if not b.is_const:
            terms.append(f(a.value[None, None], b.hess))
        hess = sum(terms[1:], terms[0])
    return Jet(value, grad, hess)


def as_points(points: npt.ArrayLike, n_dims: int) -> np.ndarray:
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != n_dims:
        raise DimensionError(f"points must have shape (P, {n_dims}), got {x.shape}")
    return x


class Field(ABC):
    """Matrix-valued function on R^N."""

    n_dims: int
    shape: MatrixShape

    @property
    def depth(self) -> int:
        return 0

    def jet(self, points: npt.ArrayLike, order: int = 2) -> Jet:
        """Evaluate value and partials; `order` is an upper bound."""
        x = as_points(points, self.n_dims)
        return self._jet(x, min(order, 2), {})

    def _jet(self, x: np.ndarray, order: int, cache: dict) -> Jet:
        key = (id(self), order)
        if key not in cache:
            cache[key] = self._evaluate(x, order, cache)
        return cache[key]

    @abstractmethod
    def _evaluate(self, x: np.ndarray, order: int, cache: dict) -> Jet:
        raise NotImplementedError

    def values(self, points: npt.ArrayLike) -> np.ndarray:
        x = as_points(points, self.n_dims)
        v = self.jet(x, 0).value
        return np.broadcast_to(v, (len(x),) + self.shape.as_tuple()).copy()

    # expression builders

    def __add__(self, other: "Field") -> "DerivedField":
        return DerivedField.build("add", (self, _lift(other, self)))

    def __sub__(self, other: "Field") -> "DerivedField":
        return DerivedField.build("sub", (self, _lift(other, self)))

    def __neg__(self) -> "DerivedField":
        return DerivedField.build("scale", (self,), -1.0)

    def __matmul__(self, other: "Field") -> "DerivedField":
        return DerivedField.build("matmul", (self, _lift(other, self)))

    def __rmatmul__(self, other: npt.ArrayLike) -> "DerivedField":
        return DerivedField.build("matmul", (_lift(other, self), self))

    def __mul__(self, other: Any) -> "DerivedField":
        if isinstance(other, Field):
            return DerivedField.build("mul", (self, other))
        return DerivedField.build("scale", (self,), complex(other))

    __rmul__ = __mul__

    def __truediv__(self, s: complex) -> "DerivedField":
        return DerivedField.build("scale", (self,), 1.0 / complex(s))

    def dagger(self) -> "DerivedField":
        return DerivedField.build("dagger", (self,))

    def conj(self) -> "DerivedField":
        return DerivedField.build("conj", (self,))

    def inverse(self) -> "DerivedField":
        return DerivedField.build("inverse", (self,))

    def partial(self, mu: int) -> "DerivedField":
        if not 0 <= mu < self.n_dims:
            raise DimensionError(f"axis {mu} out of range for N={self.n_dims}")
        return DerivedField.build("partial", (self,), mu)

    def commutator(self, other: "Field") -> "DerivedField":
        return DerivedField.build("commutator", (self, _lift(other, self)))

    def trace(self) -> "DerivedField":
        return DerivedField.build("trace", (self,))


def _lift(other: Any, like: Field) -> Field:
    if isinstance(other, Field):
        return other
    return ConstantField(np.asarray(other, dtype=np.complex128), like.n_dims)


class ConstantField(Field):
    def __init__(self, value: npt.ArrayLike, n_dims: int):
        v = np.asarray(value, dtype=np.complex128)
        if v.ndim == 0:
            v = v.reshape(1, 1)
        self.value = v
        self.n_dims = n_dims
        self.shape = MatrixShape.of(v)

    def _evaluate(self, x: np.ndarray, order: int, cache: dict) -> Jet:
        return Jet.constant(self.value)


class SmoothField(Field):
    """Finite Fourier sum  sum_m C_m exp(i w_m . x)  with exact partials."""

    def __init__(
        self,
        wavevectors: npt.ArrayLike,
        coeffs: npt.ArrayLike,
        period: Sequence[float] | None = None,
    ):
        w = np.asarray(wavevectors, dtype=float)
        cf = np.asarray(coeffs, dtype=np.complex128)
        if w.ndim != 2 or cf.ndim != 3 or w.shape[0] != cf.shape[0]:
            raise DimensionError(f"modes mismatch: wavevectors {w.shape}, coeffs {cf.shape}")
        self.wavevectors = w
        self.coeffs = cf
        self.n_dims = int(w.shape[1])
        self.shape = MatrixShape(int(cf.shape[1]), int(cf.shape[2]))
        self.period = None if period is None else tuple(float(p) for p in period)

    @staticmethod
    def from_modes(k: npt.ArrayLike, coeffs: npt.ArrayLike, period: float | Sequence[float] = 2 * np.pi) -> "SmoothField":
        kk = np.asarray(k, dtype=float)
        per = np.broadcast_to(np.asarray(period, dtype=float), (kk.shape[1],))
        return SmoothField(2 * np.pi * kk / per, coeffs, tuple(per))

    @staticmethod
    def constant(value: npt.ArrayLike, n_dims: int) -> "SmoothField":
        v = np.asarray(value, dtype=np.complex128)
        return SmoothField(np.zeros((1, n_dims)), v[None], None)

    @staticmethod
    def zero(n_dims: int, shape: MatrixShape) -> "SmoothField":
        return SmoothField.constant(np.zeros(shape.as_tuple()), n_dims)

    def _evaluate(self, x: np.ndarray, order: int, cache: dict) -> Jet:
        phase = np.exp(1j * (x @ self.wavevectors.T))
        value = np.einsum("pm,mij->pij", phase, self.coeffs)
        grad = hess = None
        ik = 1j * self.wavevectors
        if order >= 1:
            grad = np.einsum("pm,mu,mij->upij", phase, ik, self.coeffs)
        if order >= 2:
            hess = np.einsum("pm,mu,mv,mij->uvpij", phase, ik, ik, self.coeffs)
        return Jet(value, grad, hess).check_finite(x)

    def __add__(self, other: Field) -> Field:  # type: ignore[override]
        if isinstance(other, SmoothField) and other.shape == self.shape and other.n_dims == self.n_dims:
            period = self.period if self.period == other.period else None
            return SmoothField(
                np.vstack([self.wavevectors, other.wavevectors]),
                np.concatenate([self.coeffs, other.coeffs]),
                period,
            )
        return super().__add__(other)

    def to_dict(self) -> dict[str, Any]:
        modes = []
        for w, cf in zip(self.wavevectors, self.coeffs):
            k = w * np.asarray(self.period) / (2 * np.pi) if self.period else w
            modes.append({"k": k.tolist(), "re": np.real(cf).tolist(), "im": np.imag(cf).tolist()})
        return {
            "modes": modes,
            "period": list(self.period) if self.period else None,
            "shape": [self.shape.rows, self.shape.cols],
            "n_dims": self.n_dims,
        }

    @staticmethod
    def from_dict(obj: dict[str, Any]) -> "SmoothField":
        try:
            n_dims = int(obj["n_dims"])
            rows, cols = (int(v) for v in obj["shape"])
            modes = obj["modes"]
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError(f"malformed field document: {e}") from e
        k = np.array([m["k"] for m in modes], dtype=float).reshape(len(modes), n_dims)
        coeffs = np.array([np.asarray(m["re"]) + 1j * np.asarray(m["im"]) for m in modes]).reshape(len(modes), rows, cols)
        if obj.get("period"):
            return SmoothField.from_modes(k, coeffs, obj["period"])
        return SmoothField(k, coeffs, None)


class DerivedField(Field):
    """Expression node over other fields."""

    _ARITY = {
        "add": 2, "sub": 2, "matmul": 2, "mul": 2, "commutator": 2,
        "scale": 1, "dagger": 1, "conj": 1, "inverse": 1, "partial": 1, "trace": 1,
    }

    def __init__(self, op: str, children: tuple[Field, ...], param: Any, shape: MatrixShape):
        self.op = op
        self.children = children
        self.param = param
        self.shape = shape
        self.n_dims = children[0].n_dims
        self._depth = 1 + max(ch.depth for ch in children)
        if self._depth > MAX_DEPTH:
            raise ValidationError(f"expression depth {self._depth} exceeds {MAX_DEPTH}")

    @property
    def depth(self) -> int:
        return self._depth

    @staticmethod
    def build(op: str, children: tuple[Field, ...], param: Any = None) -> "DerivedField":
        if op not in DerivedField._ARITY or len(children) != DerivedField._ARITY[op]:
            raise ValidationError(f"bad expression node '{op}' with {len(children)} operands")
        if len({ch.n_dims for ch in children}) != 1:
            raise DimensionError("operands live on different numbers of dimensions")
        return DerivedField(op, children, param, _result_shape(op, children))

    def _evaluate(self, x: np.ndarray, order: int, cache: dict) -> Jet:
        op = self.op
        if op == "partial":
            return self.children[0]._jet(x, min(order + 1, 2), cache).partial(self.param).truncate(order)
        js = [ch._jet(x, order, cache) for ch in self.children]
        if op == "add":
            return js[0] + js[1]
        if op == "sub":
            return js[0] - js[1]
        if op == "matmul":
            return js[0] @ js[1]
        if op == "mul":
            return js[0] * js[1]
        if op == "commutator":
            return (js[0] @ js[1]) - (js[1] @ js[0])
        if op == "scale":
            return js[0].scale(self.param)
        if op == "dagger":
            return js[0].dagger()
        if op == "conj":
            return js[0].conj()
        if op == "trace":
            return js[0].mtrace()
        return js[0].inverse(x)


def _result_shape(op: str, children: tuple[Field, ...]) -> MatrixShape:
    a = children[0].shape
    if op in ("add", "sub"):
        if a != children[1].shape:
            raise DimensionError(f"cannot {op} {a.as_tuple()} and {children[1].shape.as_tuple()}")
        return a
    if op == "matmul":
        b = children[1].shape
        if a.cols != b.rows:
            raise DimensionError(f"cannot multiply {a.as_tuple()} by {b.as_tuple()}")
        return MatrixShape(a.rows, b.cols)
    if op == "mul":
        b = children[1].shape
        if a == b or b == MatrixShape(1, 1):
            return a
        if a == MatrixShape(1, 1):
            return b
        raise DimensionError(f"elementwise product needs a 1x1 factor, got {a.as_tuple()} and {b.as_tuple()}")
    if op == "commutator":
        if a != children[1].shape or a.rows != a.cols:
            raise DimensionError("commutator needs equal square shapes")
        return a
    if op == "dagger":
        return a.transposed
    if op == "trace":
        if a.rows != a.cols:
            raise DimensionError("trace of non-square field")
        return MatrixShape(1, 1)
    if op == "inverse" and a.rows != a.cols:
        raise DimensionError("inverse of non-square field")
    return a


def identity_field(c: int, n_dims: int) -> ConstantField:
    return ConstantField(np.eye(c, dtype=np.complex128), n_dims)


def random_smooth_field(
    seed: int | np.random.Generator | None,
    n_dims: int,
    shape: MatrixShape,
    max_mode: int = 2,
    amplitude: float = 1.0,
    algebra: LieAlgebraSpec | None = None,
    period: float | Sequence[float] = 2 * np.pi,
    n_modes: int = 4,
) -> SmoothField:
    """Random trigonometric field with coefficients decaying like 1/(1+|k|)^3.

    With `algebra`, each mode pair a cos(k.x) + b sin(k.x) uses a, b in g, so
    the field is pointwise in g.
    """
    if max_mode < 1:
        raise ValidationError(f"max_mode must be >= 1, got {max_mode}")
    rng = as_rng(seed)
    k = rng.integers(-max_mode, max_mode + 1, size=(n_modes, n_dims))
    decay = amplitude / (1.0 + np.linalg.norm(k, axis=1)) ** 3
    if algebra is None:
        coeffs = (rng.standard_normal((n_modes,) + shape.as_tuple())
                  + 1j * rng.standard_normal((n_modes,) + shape.as_tuple()))
        return SmoothField.from_modes(k, decay[:, None, None] * coeffs, period)

    if shape != MatrixShape(algebra.c, algebra.c):
        raise DimensionError(f"algebra-valued field must be {algebra.c}x{algebra.c}")
    a = algebra.combine(rng.standard_normal((n_modes, algebra.dim)))
    b = algebra.combine(rng.standard_normal((n_modes, algebra.dim)))
    d = decay[:, None, None]
    coeffs = np.concatenate([d * (a - 1j * b) / 2, d * (a + 1j * b) / 2])
    return SmoothField.from_modes(np.vstack([k, -k]), coeffs, period)


def cayley_field(x: Field) -> DerivedField:
    """(I + X/2)(I - X/2)^-1, which lies in G_J whenever X lies in g_J."""
    eye = identity_field(x.shape.rows, x.n_dims)
    return (eye + x * 0.5) @ (eye - x * 0.5).inverse()


# gauge data


@dataclass(frozen=True, eq=False)
class GaugeConfig:
    algebra: LieAlgebraSpec
    components: tuple[Field, ...]

    def __post_init__(self) -> None:
        c = self.algebra.c
        for comp in self.components:
            if comp.shape != MatrixShape(c, c):
                raise DimensionError(f"gauge components must be {c}x{c}, got {comp.shape.as_tuple()}")
        if len({comp.n_dims for comp in self.components}) > 1:
            raise DimensionError("gauge components live on different numbers of dimensions")

    @property
    def n_dims(self) -> int:
        return len(self.components)

    @property
    def c(self) -> int:
        return self.algebra.c

    def __getitem__(self, mu: int) -> Field:
        return self.components[mu]

    def membership_defect(self, points: npt.ArrayLike) -> float:
        return max(membership_defect(self.algebra, comp.values(points)) for comp in self.components)

    def check_membership(self, points: npt.ArrayLike, tol: float = 1e-9) -> float:
        d = self.membership_defect(points)
        if d > tol:
            raise ValidationError(f"gauge field leaves the algebra (defect {d:.3e})")
        return d


def random_gauge_config(
    seed: int | np.random.Generator | None,
    algebra: LieAlgebraSpec,
    n_dims: int,
    max_mode: int = 2,
    amplitude: float = 1.0,
    period: float | Sequence[float] = 2 * np.pi,
) -> GaugeConfig:
    rng = as_rng(seed)
    shape = MatrixShape(algebra.c, algebra.c)
    comps = tuple(
        random_smooth_field(rng, n_dims, shape, max_mode, amplitude, algebra, period) for _ in range(n_dims)
    )
    return GaugeConfig(algebra, comps)


def constant_gauge_config(algebra: LieAlgebraSpec, mats: Sequence[npt.ArrayLike], n_dims: int | None = None) -> GaugeConfig:
    n = len(mats) if n_dims is None else n_dims
    return GaugeConfig(algebra, tuple(ConstantField(m, n) for m in mats))


def zero_gauge_config(algebra: LieAlgebraSpec, n_dims: int) -> GaugeConfig:
    return constant_gauge_config(algebra, [np.zeros((algebra.c, algebra.c))] * n_dims)


def random_group_field(
    seed: int | np.random.Generator | None,
    algebra: LieAlgebraSpec,
    n_dims: int,
    max_mode: int = 2,
    amplitude: float = 1.0,
    period: float | Sequence[float] = 2 * np.pi,
) -> DerivedField:
    x = random_smooth_field(seed, n_dims, MatrixShape(algebra.c, algebra.c), max_mode, amplitude, algebra, period)
    return cayley_field(x)


def gauge_transform_matter(psi: Field, u: Field) -> DerivedField:
    """psi -> psi U."""
    if psi.shape.cols != u.shape.rows:
        raise DimensionError(f"matter field has {psi.shape.cols} columns, U is {u.shape.as_tuple()}")
    return psi @ u


def gauge_transform_gauge(a: GaugeConfig, u: Field) -> GaugeConfig:
    """A_mu -> U^-1 A_mu U - U^-1 d_mu U."""
    if u.shape != MatrixShape(a.c, a.c):
        raise DimensionError(f"U must be {a.c}x{a.c}")
    ui = u.inverse()
    comps = tuple(ui @ a[mu] @ u - ui @ u.partial(mu) for mu in range(a.n_dims))
    return GaugeConfig(a.algebra, comps)


def covariant_right(psi: Field, a: GaugeConfig, mu: int) -> DerivedField:
    """d_mu psi + psi A_mu."""
    if psi.shape.cols != a.c:
        raise DimensionError(f"matter field has {psi.shape.cols} columns, gauge algebra has c={a.c}")
    return psi.partial(mu) + psi @ a[mu]


def covariant_ad(u: Field, a: GaugeConfig, mu: int) -> DerivedField:
    """d_mu U - [A_mu, U]."""
    if u.shape != MatrixShape(a.c, a.c):
        raise DimensionError(f"U must be {a.c}x{a.c}")
    return u.partial(mu) - a[mu].commutator(u)


def first_order_residual(
    psi: Field,
    a: GaugeConfig,
    gammas: Sequence[npt.ArrayLike],
    mass: npt.ArrayLike,
    source: Field | None = None,
) -> DerivedField:
    """Gamma^mu (d_mu psi + psi A_mu) + M psi - f."""
    if len(gammas) != a.n_dims:
        raise DimensionError(f"need {a.n_dims} Gamma matrices, got {len(gammas)}")
    out: Field = ConstantField(mass, psi.n_dims) @ psi
    for mu, g in enumerate(gammas):
        out = out + ConstantField(g, psi.n_dims) @ covariant_right(psi, a, mu)
    if source is not None:
        out = out - source
    return out  # type: ignore[return-value]


@dataclass(frozen=True, eq=False)
class FieldStrength:
    """F_mu,nu for mu < nu; `get` extends antisymmetrically."""

    gauge: GaugeConfig
    components: dict[tuple[int, int], Field] = field(repr=False)

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return sorted(self.components)

    def get(self, mu: int, nu: int) -> Field:
        if mu == nu:
            return ConstantField(np.zeros((self.gauge.c, self.gauge.c)), self.gauge.n_dims)
        if mu < nu:
            return self.components[(mu, nu)]
        return -self.components[(nu, mu)]


def index_pairs(n_dims: int) -> list[tuple[int, int]]:
    return [(mu, nu) for mu in range(n_dims) for nu in range(mu + 1, n_dims)]


def field_strength(a: GaugeConfig) -> FieldStrength:
    comps: dict[tuple[int, int], Field] = {}
    for mu, nu in index_pairs(a.n_dims):
        comps[(mu, nu)] = a[nu].partial(mu) - a[mu].partial(nu) - a[mu].commutator(a[nu])
    return FieldStrength(a, comps)


def check_covariance(a: GaugeConfig, u: Field, points: npt.ArrayLike, workers: int = 1) -> float:
    """max ||F^_mu,nu - U^-1 F_mu,nu U|| over points and index pairs."""
    x = as_points(points, a.n_dims)
    f = field_strength(a)
    f_hat = field_strength(gauge_transform_gauge(a, u))
    ui = u.inverse()
    diffs = [f_hat.get(mu, nu) - ui @ f.get(mu, nu) @ u for mu, nu in f.pairs]

    def chunk_defect(chunk: np.ndarray) -> float:
        return max((max_frobenius(d.values(chunk)) for d in diffs), default=0.0)

    return sweep_max(chunk_defect, x, workers)


# grids and divergences


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid with `points_per_axis` samples per axis."""

    n_dims: int
    points_per_axis: int
    period: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.points_per_axis < 4:
            raise ValidationError(f"grid needs at least 4 points per axis, got {self.points_per_axis}")
        if isinstance(self.period, (int, float)):
            object.__setattr__(self, "period", (float(self.period),) * self.n_dims)
        elif not self.period:
            object.__setattr__(self, "period", (2 * np.pi,) * self.n_dims)
        elif len(self.period) == 1 and self.n_dims > 1:
            object.__setattr__(self, "period", (float(self.period[0]),) * self.n_dims)
        else:
            object.__setattr__(self, "period", tuple(float(p) for p in self.period))
        if len(self.period) != self.n_dims or min(self.period) <= 0:
            raise ValidationError(f"grid period must give {self.n_dims} positive lengths, got {self.period}")

    @property
    def h(self) -> np.ndarray:
        return np.asarray(self.period) / self.points_per_axis

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.n_dims

    @property
    def size(self) -> int:
        return self.points_per_axis ** self.n_dims

    def points(self) -> np.ndarray:
        axes = [np.arange(self.points_per_axis) * h for h in self.h]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def refine(self) -> "Grid":
        return Grid(self.n_dims, 2 * self.points_per_axis, self.period)

    def cell_volume(self) -> float:
        return float(np.prod(self.h))


def grid_divergence(v: Sequence[npt.ArrayLike] | np.ndarray, grid: Grid) -> np.ndarray:
    """Periodic central-difference divergence of samples taken at `grid.points()`."""
    comps = [np.asarray(c) for c in v]
    if len(comps) != grid.n_dims:
        raise DimensionError(f"need {grid.n_dims} flux components, got {len(comps)}")
    out = np.zeros(grid.shape, dtype=np.result_type(*comps))
    for mu, comp in enumerate(comps):
        if comp.size != grid.size:
            raise DimensionError(f"component {mu} has {comp.size} samples, grid has {grid.size}")
        a = comp.reshape(grid.shape)
        out = out + (np.roll(a, -1, axis=mu) - np.roll(a, 1, axis=mu)) / (2 * grid.h[mu])
    return out.ravel()


def stencil_divergence(
    sampler: Callable[[np.ndarray], np.ndarray],
    points: np.ndarray,
    h: float | Sequence[float],
) -> np.ndarray:
    """Central-difference divergence of a flux sampled exactly at x +- h e_mu.

    `sampler(points)` returns an (N, P) array of flux components.
    """
    n = points.shape[1]
    hs = np.broadcast_to(np.asarray(h, dtype=float), (n,))
    out = None
    for mu in range(n):
        step = np.zeros(n)
        step[mu] = hs[mu]
        d = (sampler(points + step)[mu] - sampler(points - step)[mu]) / (2 * hs[mu])
        out = d if out is None else out + d
    return out


def torus_mean(samples: npt.ArrayLike) -> complex:
    """Trapezoid rule on the periodic grid (exact for trigonometric polynomials of low degree)."""
    return complex(np.mean(np.asarray(samples)))


def samples_frame(points: np.ndarray, values: npt.ArrayLike, name: str = "value") -> pd.DataFrame:
    """Tabulate grid samples: coordinate columns x0..x{N-1}, then value columns."""
    v = np.asarray(values)
    frame = pd.DataFrame(points, columns=[f"x{i}" for i in range(points.shape[1])])
    flat = v.reshape(len(points), -1)
    for col in range(flat.shape[1]):
        suffix = "" if flat.shape[1] == 1 else f"_{col}"
        frame[f"{name}{suffix}_re"] = np.real(flat[:, col])
        frame[f"{name}{suffix}_im"] = np.imag(flat[:, col])
    return frame


def export_samples_csv(path: str | Path, points: np.ndarray, values: npt.ArrayLike, name: str = "value") -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    samples_frame(points, values, name).to_csv(out, index=False)
    return out


def observed_order(coarse: float, fine: float, ratio: float = 2.0, floor: float = 1e-13) -> float:
    """log_ratio(coarse / fine); +inf when both errors sit at round-off level."""
    if fine <= floor:
        return float("inf")
    if coarse <= 0:
        return 0.0
    return float(np.log(coarse / fine) / np.log(ratio))
