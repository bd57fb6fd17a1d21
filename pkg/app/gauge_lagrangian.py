"""app.gauge_lagrangian

Free gauge-field proto-Lagrangians G(P_mu,nu ; Q_theta,rho* ; x), their
Euler-Lagrange residuals, and the static and dynamic gauge extensions of
matter Lagrangians.

Arguments are indexed by ordered pairs mu < nu (0-based). On a gauge
configuration P_mu,nu = F_mu,nu and Q_mu,nu* = F_mu,nu^dagger. Slots follow the
transposed convention of `app.lagrangian`: dG = sum Tr[G^(mu nu) dP_mu,nu] +
sum Tr[G^(mu nu *) dQ_mu,nu*].
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
import numpy.typing as npt

from app.contracts.models import DerivativeBackend, GaugeVariant
from app.errors import DimensionError, EvaluationError, PreconditionError, ValidationError
from app.fields import (
    Field,
    GaugeConfig,
    Jet,
    as_jet,
    as_points,
    covariant_right,
    field_strength,
    gauge_transform_gauge,
    gauge_transform_matter,
    index_pairs,
)
from app.lagrangian import (
    OUTER_STEP,
    SLOT_STEP,
    DensityEvaluation,
    ProtoLagrangian,
    SlotPoint,
    Slots,
    as_batch,
    density,
    entry_gradient,
    mtr,
    require_backend,
    slot_flux,
    zeros_like_slot,
)
from app.lie import (
    LieAlgebraSpec,
    LieGroupSpec,
    dagger_stable,
    is_involutive_j,
    membership_defect,
    ortho_complement,
    ortho_project,
    q_j,
    sample_algebra,
    sample_group,
)
from app.matcore import as_rng, commutator, dagger, matrix_from_json, max_frobenius

Pair = tuple[int, int]


def _comm(a: Any, b: Any) -> Any:
    return a @ b - b @ a


def linear_on_slot(fn: Callable[[np.ndarray], np.ndarray], m: Any) -> Any:
    """Apply a real-linear matrix map to an array or to every order of a jet."""
    if not isinstance(m, Jet):
        return fn(m)
    return Jet(
        fn(m.value),
        None if m.grad is None else fn(m.grad),
        None if m.hess is None else fn(m.hess),
        m.is_const,
    )


@dataclass(frozen=True, eq=False)
class GaugeSlotPoint:
    p: dict[Pair, Any]
    q: dict[Pair, Any]
    x: np.ndarray
    jets: bool = False

    @property
    def batch(self) -> int:
        return len(self.x)

    def with_p(self, pair: Pair, value: Any) -> "GaugeSlotPoint":
        return dataclasses.replace(self, p={**self.p, pair: value})

    def with_q(self, pair: Pair, value: Any) -> "GaugeSlotPoint":
        return dataclasses.replace(self, q={**self.q, pair: value})

    @staticmethod
    def from_config(a: GaugeConfig, points: npt.ArrayLike, jets: bool = False) -> "GaugeSlotPoint":
        x = as_points(points, a.n_dims)
        f = field_strength(a)
        if jets:
            p = {pair: f.components[pair].jet(x, 1) for pair in f.pairs}
        else:
            p = {pair: f.components[pair].values(x) for pair in f.pairs}
        return GaugeSlotPoint(p, {pair: dagger(v) for pair, v in p.items()}, x, jets)

    @staticmethod
    def random(
        algebra: LieAlgebraSpec,
        n_dims: int,
        count: int,
        seed: int | np.random.Generator | None = 0,
        tied: bool = True,
    ) -> "GaugeSlotPoint":
        """P in g; Q* = P^dagger when `tied`."""
        rng = as_rng(seed)
        p: dict[Pair, Any] = {}
        q: dict[Pair, Any] = {}
        for pair in index_pairs(n_dims):
            p[pair] = np.stack([sample_algebra(algebra, rng) for _ in range(count)])
            q[pair] = dagger(p[pair]) if tied else np.stack([sample_algebra(algebra, rng) for _ in range(count)])
        x = rng.uniform(0.0, 2 * np.pi, size=(count, n_dims))
        return GaugeSlotPoint(p, q, x)


@dataclass(frozen=True, eq=False)
class GaugeSlots:
    g: dict[Pair, Any]
    g_star: dict[Pair, Any]

    def distance(self, other: "GaugeSlots", batch: int) -> float:
        d = 0.0
        for pair in self.g:
            d = max(d, max_frobenius(as_batch(self.g[pair], batch) - as_batch(other.g[pair], batch)))
            d = max(d, max_frobenius(as_batch(self.g_star[pair], batch) - as_batch(other.g_star[pair], batch)))
        return d


@dataclass(frozen=True, eq=False)
class HatSlots:
    """G^(mu nu) for every ordered index pair: antisymmetric, zero on the diagonal."""

    slots: GaugeSlots
    n_dims: int

    def _zero(self) -> Any:
        return zeros_like_slot(next(iter(self.slots.g.values())))

    def get(self, mu: int, nu: int) -> Any:
        if mu == nu:
            return self._zero()
        return self.slots.g[(mu, nu)] if mu < nu else -self.slots.g[(nu, mu)]

    def get_star(self, mu: int, nu: int) -> Any:
        if mu == nu:
            return self._zero()
        return self.slots.g_star[(mu, nu)] if mu < nu else -self.slots.g_star[(nu, mu)]


@dataclass(frozen=True, eq=False)
class GaugeProtoLagrangian:
    name: str
    n_dims: int
    c: int
    value_fn: Callable[[GaugeSlotPoint], Any]
    slot_fn: Callable[[GaugeSlotPoint], GaugeSlots] | None = None
    x_dependent: bool = False
    jet_capable: bool = True
    params: dict[str, Any] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if self.n_dims < 2:
            raise ValidationError(f"gauge Lagrangians need N >= 2, got {self.n_dims}")

    @property
    def pairs(self) -> list[Pair]:
        return index_pairs(self.n_dims)

    def value(self, sp: GaugeSlotPoint) -> Any:
        v = self.value_fn(sp)
        if isinstance(v, Jet):
            return v
        v = np.asarray(v, dtype=np.complex128)
        if not np.all(np.isfinite(v)):
            idx = int(np.argmax(~np.isfinite(np.atleast_1d(v))))
            raise EvaluationError(f"{self.name}: non-finite gauge Lagrangian value", sp.x[idx].tolist())
        return v

    def slots(self, sp: GaugeSlotPoint) -> GaugeSlots:
        if self.slot_fn is None:
            return numeric_gauge_slots(self, sp)
        return self.slot_fn(sp)

    def hat(self, sp: GaugeSlotPoint) -> HatSlots:
        return HatSlots(self.slots(sp), self.n_dims)

    def grad_x(self, sp: GaugeSlotPoint, eps: float = SLOT_STEP) -> np.ndarray:
        """G^(nabla), shape (B, N)."""
        if not self.x_dependent:
            return np.zeros((sp.batch, self.n_dims))
        cols = []
        for mu in range(self.n_dims):
            dx = np.zeros(self.n_dims)
            dx[mu] = eps
            plus = self.value(dataclasses.replace(sp, x=sp.x + dx))
            minus = self.value(dataclasses.replace(sp, x=sp.x - dx))
            cols.append((plus - minus) / (2 * eps))
        return np.stack(cols, axis=1)

    def check_config(self, a: GaugeConfig) -> None:
        if a.n_dims != self.n_dims or a.c != self.c:
            raise DimensionError(
                f"{self.name} expects N={self.n_dims}, c={self.c}; got N={a.n_dims}, c={a.c}"
            )


def numeric_gauge_slots(G: GaugeProtoLagrangian, sp: GaugeSlotPoint, eps: float = SLOT_STEP) -> GaugeSlots:
    c = G.c
    g = {pair: entry_gradient(lambda z, pr=pair: G.value(sp.with_p(pr, z)), sp.p[pair], c, c, eps) for pair in G.pairs}
    g_star = {pair: entry_gradient(lambda z, pr=pair: G.value(sp.with_q(pr, z)), sp.q[pair], c, c, eps) for pair in G.pairs}
    return GaugeSlots(g, g_star)


def gauge_density(G: GaugeProtoLagrangian, a: GaugeConfig, points: npt.ArrayLike) -> np.ndarray:
    G.check_config(a)
    return np.asarray(G.value(GaugeSlotPoint.from_config(a, points)))


def gauge_realness_defect(G: GaugeProtoLagrangian, algebra: LieAlgebraSpec, seed: int | np.random.Generator | None = 0, samples: int = 20) -> float:
    """max |Im G| with Q* = P^dagger and P in g."""
    sp = GaugeSlotPoint.random(algebra, G.n_dims, samples, seed)
    return float(np.max(np.abs(np.imag(G.value(sp)))))


def gauge_slot_dagger_defect(G: GaugeProtoLagrangian, algebra: LieAlgebraSpec, seed: int | np.random.Generator | None = 0, samples: int = 20) -> float:
    """max ||G^(mu nu *) - (G^(mu nu))^dagger|| on g-valued samples."""
    sp = GaugeSlotPoint.random(algebra, G.n_dims, samples, seed)
    s = G.slots(sp)
    return max(
        (max_frobenius(as_batch(s.g_star[pair], sp.batch) - dagger(as_batch(s.g[pair], sp.batch))) for pair in G.pairs),
        default=0.0,
    )


# quadratic family


def minkowski_sign(mu: int, nu: int) -> int:
    """(-1)^(delta_mu0 + delta_nu0); axis 0 is time."""
    return (-1) ** (int(mu == 0) + int(nu == 0))


@dataclass(frozen=True, eq=False)
class QuadraticCoeffs:
    """h_(mu nu)(theta rho) as a Hermitian matrix over `index_pairs(n_dims)`."""

    n_dims: int
    h: np.ndarray

    def __post_init__(self) -> None:
        m = len(index_pairs(self.n_dims))
        h = np.asarray(self.h, dtype=np.complex128)
        if h.shape != (m, m):
            raise DimensionError(f"quadratic coefficients for N={self.n_dims} must be {m}x{m}, got {h.shape}")
        defect = max_frobenius(h - dagger(h))
        if defect > 1e-12:
            raise ValidationError(f"quadratic coefficients violate the Hermitian pairing (defect {defect:.3e})")
        object.__setattr__(self, "h", h)

    @property
    def pairs(self) -> list[Pair]:
        return index_pairs(self.n_dims)

    @property
    def real(self) -> bool:
        return bool(np.all(np.imag(self.h) == 0))

    def index(self, pair: Pair) -> int:
        return self.pairs.index(pair)

    def coefficient(self, left: Pair, right: Pair) -> complex:
        return complex(self.h[self.index(left), self.index(right)])

    def hat(self, mu: int, nu: int, theta: int, rho: int) -> complex:
        """Extension to all index pairs, antisymmetric in each pair."""
        if mu == nu or theta == rho:
            return 0.0
        sign = 1
        if mu > nu:
            mu, nu, sign = nu, mu, -sign
        if theta > rho:
            theta, rho, sign = rho, theta, -sign
        return sign * self.coefficient((mu, nu), (theta, rho))

    @staticmethod
    def identity(n_dims: int) -> "QuadraticCoeffs":
        m = len(index_pairs(n_dims))
        return QuadraticCoeffs(n_dims, np.eye(m))

    @staticmethod
    def minkowski() -> "QuadraticCoeffs":
        return QuadraticCoeffs(4, np.diag([minkowski_sign(mu, nu) for mu, nu in index_pairs(4)]).astype(float))

    @staticmethod
    def from_config(obj: dict[str, Any]) -> "QuadraticCoeffs":
        """`{"kind": "identity"|"minkowski", "n_dims": N}` or `{"n_dims": N, "h": matrix}`."""
        kind = obj.get("kind", "matrix")
        if kind == "minkowski":
            return QuadraticCoeffs.minkowski()
        if "n_dims" not in obj:
            raise ValidationError("quadratic coefficients need 'n_dims'")
        n = int(obj["n_dims"])
        if kind == "identity":
            return QuadraticCoeffs.identity(n)
        if "h" not in obj:
            raise ValidationError("quadratic coefficients need 'h' or a 'kind'")
        return QuadraticCoeffs(n, matrix_from_json(obj["h"]))


def quadratic_gauge_lagrangian(h: QuadraticCoeffs, c: int, name: str = "quadratic") -> GaugeProtoLagrangian:
    """G = sum h_(mu nu)(theta rho) Tr[P_mu,nu Q_theta,rho*]."""
    pairs = h.pairs
    terms = [(a, b, h.h[i, j]) for i, a in enumerate(pairs) for j, b in enumerate(pairs) if h.h[i, j] != 0]

    def value(sp: GaugeSlotPoint) -> Any:
        out = 0.0 * mtr(sp.p[pairs[0]] @ sp.q[pairs[0]])
        for a, b, coef in terms:
            out = out + coef * mtr(sp.p[a] @ sp.q[b])
        return out

    def slots(sp: GaugeSlotPoint) -> GaugeSlots:
        g = {pair: zeros_like_slot(sp.p[pair]) for pair in pairs}
        g_star = {pair: zeros_like_slot(sp.p[pair]) for pair in pairs}
        for a, b, coef in terms:
            g[a] = g[a] + coef * sp.q[b]
            g_star[b] = g_star[b] + coef * sp.p[a]
        return GaugeSlots(g, g_star)

    return GaugeProtoLagrangian(name, h.n_dims, c, value, slots, params={"h": h})


def minkowski_lagrangian(c: int = 1) -> GaugeProtoLagrangian:
    return quadratic_gauge_lagrangian(QuadraticCoeffs.minkowski(), c, name="minkowski")


def gauge_builtin(kind: str, params: dict[str, Any] | None = None) -> GaugeProtoLagrangian:
    """Named gauge Lagrangians: `quadratic` (with coefficient params), `minkowski`, `zero`."""
    p = dict(params or {})
    c = int(p.get("c", 2))
    if kind == "minkowski":
        return minkowski_lagrangian(c)
    if kind == "quadratic":
        return quadratic_gauge_lagrangian(QuadraticCoeffs.from_config(p.get("coeffs", {"kind": "identity", "n_dims": p.get("n_dims", 3)})), c)
    if kind == "zero":
        n = int(p.get("n_dims", 3))
        return quadratic_gauge_lagrangian(QuadraticCoeffs(n, np.zeros((len(index_pairs(n)),) * 2)), c, name="zero")
    raise ValidationError(f"unknown gauge Lagrangian '{kind}' (known: minkowski, quadratic, zero)")


# Euler-Lagrange residuals


def covariant_divergence(
    sampler: Callable[[np.ndarray, bool], list[list[Any]]],
    a: GaugeConfig,
    points: npt.ArrayLike,
    backend: DerivativeBackend = "fd",
    step: float = OUTER_STEP,
) -> list[np.ndarray]:
    """sum_mu (d_mu Y^(mu k) - [A_mu, Y^(mu k)]) for every k.

    `sampler(x, jets)` returns Y indexed as Y[mu][k].
    """
    n = a.n_dims
    x = as_points(points, n)
    b = len(x)
    av = [a[mu].values(x) for mu in range(n)]
    if backend == "exact":
        y = sampler(x, True)
        d = [[as_batch(as_jet(y[mu][k]).partial(mu).value, b) for k in range(n)] for mu in range(n)]
    elif backend == "fd":
        y = sampler(x, False)
        d = []
        for mu in range(n):
            dx = np.zeros(n)
            dx[mu] = step
            plus = sampler(x + dx, False)[mu]
            minus = sampler(x - dx, False)[mu]
            d.append([(as_batch(plus[k], b) - as_batch(minus[k], b)) / (2 * step) for k in range(n)])
    else:
        raise ValidationError(f"unknown derivative backend '{backend}'")
    out = []
    for k in range(n):
        acc = np.zeros((b, a.c, a.c), dtype=np.complex128)
        for mu in range(n):
            yk = as_batch(y[mu][k], b)
            acc = acc + d[mu][k] - (av[mu] @ yk - yk @ av[mu])
        out.append(acc)
    return out


def _hat_sampler(G: GaugeProtoLagrangian, a: GaugeConfig) -> Callable[[np.ndarray, bool], HatSlots]:
    def sample(x: np.ndarray, jets: bool) -> HatSlots:
        return G.hat(GaugeSlotPoint.from_config(a, x, jets))

    return sample


def gauge_el_residual(
    G: GaugeProtoLagrangian,
    a: GaugeConfig,
    points: npt.ArrayLike,
    variant: GaugeVariant = "dagger_stable",
    backend: DerivativeBackend = "fd",
    step: float = OUTER_STEP,
) -> list[np.ndarray]:
    """Residuals of the free gauge equations, one c x c batch per index k.

    dagger_stable: sum_mu nabla_mu Pi G^(mu k), needs g^dagger = g.
    qj:            the same with Pi replaced by Q_J, needs J = J^dagger = J^-1.
    general:       Pi((sum_mu nabla_mu [Pi G^(mu k *)]^dagger)^dagger).
    """
    G.check_config(a)
    require_backend(G, backend)
    algebra = a.algebra
    hats = _hat_sampler(G, a)
    n = G.n_dims

    if variant == "dagger_stable":
        if not dagger_stable(algebra):
            raise ValidationError(f"variant 'dagger_stable' needs g^dagger = g; {algebra.kind} is not")

        def sampler(x: np.ndarray, jets: bool) -> list[list[Any]]:
            hs = hats(x, jets)
            return [[linear_on_slot(algebra.project, hs.get(mu, k)) for k in range(n)] for mu in range(n)]

        return covariant_divergence(sampler, a, points, backend, step)

    if variant == "qj":
        j = algebra.j
        if j is None or not is_involutive_j(j):
            raise ValidationError("variant 'qj' needs an algebra with J = J^dagger = J^-1")

        def sampler(x: np.ndarray, jets: bool) -> list[list[Any]]:
            hs = hats(x, jets)
            return [[linear_on_slot(lambda m: q_j(j, m), hs.get(mu, k)) for k in range(n)] for mu in range(n)]

        return covariant_divergence(sampler, a, points, backend, step)

    if variant == "general":

        def sampler(x: np.ndarray, jets: bool) -> list[list[Any]]:
            hs = hats(x, jets)
            return [
                [linear_on_slot(lambda m: dagger(algebra.project(m)), hs.get_star(mu, k)) for k in range(n)]
                for mu in range(n)
            ]

        inner = covariant_divergence(sampler, a, points, backend, step)
        return [algebra.project(dagger(r)) for r in inner]

    raise ValidationError(f"unknown gauge variant '{variant}'")


def gauge_variant_agreement(
    G: GaugeProtoLagrangian,
    a: GaugeConfig,
    points: npt.ArrayLike,
    backend: DerivativeBackend = "exact",
    step: float = OUTER_STEP,
) -> dict[str, float]:
    """Differences between the residual variants that apply to `a.algebra`."""
    stable = gauge_el_residual(G, a, points, "dagger_stable", backend, step)
    general = gauge_el_residual(G, a, points, "general", backend, step)
    out = {
        "general_vs_dagger_stable": max(max_frobenius(dagger(g) - s) for g, s in zip(general, stable)),
        "membership": max(membership_defect(a.algebra, s) for s in stable),
    }
    j = a.algebra.j
    if j is not None and is_involutive_j(j):
        qj = gauge_el_residual(G, a, points, "qj", backend, step)
        out["qj_vs_dagger_stable"] = max(max_frobenius(q - s) for q, s in zip(qj, stable))
    return out


def quadratic_closed_form_residual(
    h: QuadraticCoeffs,
    a: GaugeConfig,
    points: npt.ArrayLike,
) -> list[np.ndarray]:
    """sum_mu nabla_mu sum_(a<b) h^_(mu k)(a b) F_ab^dagger with exact derivatives.

    Stated for real h and g^dagger = g.
    """
    if not h.real:
        raise ValidationError("the closed form needs real quadratic coefficients")
    if not dagger_stable(a.algebra):
        raise ValidationError(f"the closed form needs g^dagger = g; {a.algebra.kind} is not")
    if h.n_dims != a.n_dims:
        raise DimensionError(f"coefficients for N={h.n_dims}, gauge field on N={a.n_dims}")
    x = as_points(points, a.n_dims)
    n = a.n_dims
    f = field_strength(a)
    fd: dict[Pair, Field] = {pair: f.components[pair].dagger() for pair in f.pairs}
    av = [a[mu].values(x) for mu in range(n)]
    fd_vals = {pair: fd[pair].values(x) for pair in fd}
    out = []
    for k in range(n):
        acc = np.zeros((len(x), a.c, a.c), dtype=np.complex128)
        for mu in range(n):
            for pair in f.pairs:
                coef = h.hat(mu, k, *pair)
                if coef == 0:
                    continue
                acc = acc + coef * (fd[pair].partial(mu).values(x) - commutator(av[mu], fd_vals[pair]))
        out.append(acc)
    return out


# gauge extensions of matter Lagrangians


def covariant_derivs(psi: Field, a: GaugeConfig) -> list[Field]:
    return [covariant_right(psi, a, mu) for mu in range(a.n_dims)]


def _check_extension(L: ProtoLagrangian, a: GaugeConfig) -> None:
    if L.c != a.c or L.n_dims != a.n_dims:
        raise DimensionError(f"{L.name} has c={L.c}, N={L.n_dims}; gauge field has c={a.c}, N={a.n_dims}")


def static_extension(L: ProtoLagrangian, psi: Field, a: GaugeConfig, points: npt.ArrayLike) -> DensityEvaluation:
    """L with d_mu psi replaced by d_mu psi + psi A_mu."""
    _check_extension(L, a)
    return density(L, psi, points, covariant_derivs(psi, a))


def transform_slot_point(sp: SlotPoint, u: np.ndarray) -> SlotPoint:
    """psi -> psi U for a constant U."""
    ud = dagger(u)
    return sp.replace(
        p=sp.p @ u,
        qt=ud @ sp.qt,
        r=tuple(v @ u for v in sp.r),
        st=tuple(ud @ v for v in sp.st),
    )


def global_invariance_defect(
    L: ProtoLagrangian,
    algebra: LieAlgebraSpec,
    seed: int | np.random.Generator | None = 0,
    samples: int = 50,
    points: int = 8,
) -> tuple[float, np.ndarray]:
    """Worst relative change of L under psi -> psi U over `samples` constant U in G.

    Returns the defect and the U attaining it.
    """
    if algebra.c != L.c:
        raise DimensionError(f"{L.name} has c={L.c}, group acts on c={algebra.c}")
    rng = as_rng(seed)
    group = LieGroupSpec(algebra)
    sp = SlotPoint.random(rng, L.r, L.c, L.n_dims, points)
    base = np.asarray(L.value(sp))
    scale = max(1.0, float(np.max(np.abs(base))))
    worst, worst_u = 0.0, np.eye(L.c, dtype=np.complex128)
    for _ in range(samples):
        u = sample_group(group, rng)
        d = float(np.max(np.abs(np.asarray(L.value(transform_slot_point(sp, u))) - base))) / scale
        if d > worst:
            worst, worst_u = d, u
    return worst, worst_u


def local_invariance_defect(
    L: ProtoLagrangian,
    psi: Field,
    a: GaugeConfig,
    u: Field,
    points: npt.ArrayLike,
    seed: int | np.random.Generator | None = 0,
    global_tol: float = 1e-9,
) -> float:
    """max |L_(psi U, A-|U) - L_(psi, A)| for the statically extended density.

    Refuses with PreconditionError unless L is invariant under constant U.
    """
    _check_extension(L, a)
    g_defect, worst_u = global_invariance_defect(L, a.algebra, seed)
    if g_defect > global_tol:
        raise PreconditionError(
            f"{L.name} is not invariant under constant group elements "
            f"(worst U = {np.round(worst_u, 6).tolist()})",
            g_defect,
        )
    before = static_extension(L, psi, a, points).value
    after = static_extension(L, gauge_transform_matter(psi, u), gauge_transform_gauge(a, u), points).value
    return float(np.max(np.abs(after - before)))


@dataclass(frozen=True)
class ExtendedResidual:
    """Residuals of the statically extended system at a batch of points.

    `matter` (c x r) and `matter_conjugate` (r x c) are the psi equations; per index k,
    `gauge` is Pi(psi^+ [L^(k)^+ + L^(k*)]), `gauge_imag` is Pi((psi^+ [L^(k)^+ - L^(k*)]) / i),
    `split` is X + (Pi - Pi_perp) Y and `qj` is L^(k) psi - J psi^+ L^(k*) J.
    """

    matter: np.ndarray
    matter_conjugate: np.ndarray
    gauge: list[np.ndarray]
    gauge_imag: list[np.ndarray]
    split: list[np.ndarray]
    qj: list[np.ndarray] | None = None

    def split_defect(self) -> float:
        """Zero when multiplication by i swaps g and its complement."""
        return max(max_frobenius(s - (g + 1j * gi)) for s, g, gi in zip(self.split, self.gauge, self.gauge_imag))

    def qj_defect(self) -> float | None:
        if self.qj is None:
            return None
        return max(max_frobenius(q - dagger(g)) for q, g in zip(self.qj, self.gauge))

    def gauge_norm(self) -> float:
        return max(max_frobenius(g) for g in self.gauge)


def _extended_slots(L: ProtoLagrangian, psi: Field, a: GaugeConfig, x: np.ndarray) -> tuple[SlotPoint, Slots]:
    sp = SlotPoint.from_field(psi, x, covariant_derivs(psi, a))
    return sp, L.slots(sp).batched(sp.batch)


def extended_el_matter(
    L: ProtoLagrangian,
    psi: Field,
    a: GaugeConfig,
    points: npt.ArrayLike,
    backend: DerivativeBackend = "fd",
    step: float = OUTER_STEP,
) -> ExtendedResidual:
    """Euler-Lagrange equations of the statically extended Lagrangian in psi and A."""
    _check_extension(L, a)
    L.check_field(psi)
    require_backend(L, backend)
    x = as_points(points, a.n_dims)
    derivs = covariant_derivs(psi, a)

    def sampler(xs: np.ndarray, jets: bool) -> Slots:
        return L.slots(SlotPoint.from_field(psi, xs, derivs, jets))

    o, o_star, div, div_star = slot_flux(sampler, x, a.n_dims, backend, step)
    sp, s = _extended_slots(L, psi, a, x)
    av = [a[mu].values(x) for mu in range(a.n_dims)]
    matter = o - div
    matter_conj = o_star - div_star
    for mu in range(a.n_dims):
        matter = matter + av[mu] @ s.mu[mu]
        matter_conj = matter_conj + s.mu_star[mu] @ dagger(av[mu])

    algebra = a.algebra
    pd_ = dagger(np.asarray(sp.p))
    gauge, gauge_imag, split = [], [], []
    for k in range(a.n_dims):
        xk = pd_ @ dagger(s.mu[k])
        yk = pd_ @ s.mu_star[k]
        gauge.append(ortho_project(algebra, xk + yk))
        gauge_imag.append(ortho_project(algebra, (xk - yk) / 1j))
        split.append(xk + ortho_project(algebra, yk) - ortho_complement(algebra, yk))

    qj = None
    j = algebra.j
    if j is not None and is_involutive_j(j):
        psi_v = np.asarray(sp.p)
        qj = [s.mu[k] @ psi_v - j @ pd_ @ s.mu_star[k] @ j for k in range(a.n_dims)]
    return ExtendedResidual(matter, matter_conj, gauge, gauge_imag, split, qj)


def second_order_kappa_residual(L: ProtoLagrangian, psi: Field, a: GaugeConfig, points: npt.ArrayLike) -> list[np.ndarray]:
    """sum_mu (nabla_mu psi)^+ Theta^(mu k) psi - J (sum_nu psi^+ Theta^(k nu) nabla_nu psi) J,
    the algebraic gauge equation of the second-order Lagrangian."""
    if L.name != "second_order":
        raise ValidationError(f"the k-equation is defined for 'second_order', not '{L.name}'")
    _check_extension(L, a)
    x = as_points(points, a.n_dims)
    theta = L.params["theta"]
    j = a.algebra.j if a.algebra.j is not None else np.eye(a.c, dtype=np.complex128)
    psi_v = psi.values(x)
    dpsi = [d.values(x) for d in covariant_derivs(psi, a)]
    n = a.n_dims
    out = []
    for k in range(n):
        left = sum(dagger(dpsi[mu]) @ theta[mu][k] @ psi_v for mu in range(n))
        right = sum(dagger(psi_v) @ theta[k][nu] @ dpsi[nu] for nu in range(n))
        out.append(left - j @ right @ j)
    return out


def current_condition_defect(
    L: ProtoLagrangian,
    algebra: LieAlgebraSpec,
    seed: int | np.random.Generator | None = 0,
    samples: int = 20,
) -> float:
    """max ||Pi((P^+ [L^(k)^+ - L^(k*)]) / i)|| over sampled slot arguments."""
    if algebra.c != L.c:
        raise DimensionError(f"{L.name} has c={L.c}, algebra has c={algebra.c}")
    sp = SlotPoint.random(seed, L.r, L.c, L.n_dims, samples)
    s = L.slots(sp).batched(sp.batch)
    pd_ = dagger(sp.p)
    return max(
        (max_frobenius(ortho_project(algebra, pd_ @ (dagger(s.mu[k]) - s.mu_star[k]) / 1j)) for k in range(L.n_dims)),
        default=0.0,
    )


@dataclass(frozen=True)
class DynamicResidual:
    matter: np.ndarray
    matter_conjugate: np.ndarray
    # Pi(psi^+ [L^(k)^+ + L^(k*)]) - 2 (sum_mu nabla_mu Pi G^(mu k))^+
    gauge: list[np.ndarray]
    matter_source: list[np.ndarray]
    field_term: list[np.ndarray]


def dynamic_el(
    L: ProtoLagrangian,
    G: GaugeProtoLagrangian,
    psi: Field,
    a: GaugeConfig,
    points: npt.ArrayLike,
    backend: DerivativeBackend = "fd",
    step: float = OUTER_STEP,
    condition_tol: float = 1e-9,
) -> DynamicResidual:
    """Euler-Lagrange equations of L extended by the free gauge Lagrangian G."""
    G.check_config(a)
    if not dagger_stable(a.algebra):
        raise PreconditionError(f"the dynamic extension needs g^dagger = g; {a.algebra.kind} is not")
    defect = current_condition_defect(L, a.algebra)
    if defect > condition_tol:
        raise PreconditionError(f"{L.name} violates the current condition", defect)
    ext = extended_el_matter(L, psi, a, points, backend, step)
    stable = gauge_el_residual(G, a, points, "dagger_stable", backend, step)
    field_term = [-2 * dagger(r) for r in stable]
    gauge = [src + ft for src, ft in zip(ext.gauge, field_term)]
    return DynamicResidual(ext.matter, ext.matter_conjugate, gauge, ext.gauge, field_term)


# stacked matter-field view of the free gauge equations


def _selectors(n: int, c: int) -> list[np.ndarray]:
    out = []
    for k in range(n):
        s = np.zeros((c, n * c), dtype=np.complex128)
        s[:, k * c:(k + 1) * c] = np.eye(c)
        out.append(s)
    return out


def stacked_view_consistency(
    G: GaugeProtoLagrangian,
    a: GaugeConfig,
    points: npt.ArrayLike,
    backend: DerivativeBackend = "fd",
    step: float = OUTER_STEP,
) -> float:
    """Treat col[A_1..A_N] as an (N c) x c matter field and compare its residual
    with the dagger-stable gauge residual.

    Slots of the stacked view, per block k:
        L^(o)    = -sum_mu [G^(mu k), A_mu]        L^(mu)  = row[G^(mu k)]
        L^(o*)   =  sum_mu [G^(mu k *), A_mu^+]    L^(mu*) = col[G^(mu k *)]
    """
    G.check_config(a)
    if not dagger_stable(a.algebra):
        raise ValidationError(f"the stacked view needs g^dagger = g; {a.algebra.kind} is not")
    require_backend(G, backend)
    n, c = a.n_dims, a.c
    sel = _selectors(n, c)
    hats = _hat_sampler(G, a)

    def sampler(x: np.ndarray, jets: bool) -> Slots:
        hs = hats(x, jets)
        av = [a[mu].jet(x, 1) if jets else a[mu].values(x) for mu in range(n)]
        o = o_star = None
        for k in range(n):
            ok = sum((-_comm(hs.get(mu, k), av[mu]) for mu in range(n)), zeros_like_slot(av[0]))
            osk = sum((_comm(hs.get_star(mu, k), dagger(av[mu])) for mu in range(n)), zeros_like_slot(av[0]))
            o = ok @ sel[k] if o is None else o + ok @ sel[k]
            o_star = sel[k].T @ osk if o_star is None else o_star + sel[k].T @ osk
        mu_slots = tuple(
            sum((hs.get(mu, k) @ sel[k] for k in range(1, n)), hs.get(mu, 0) @ sel[0]) for mu in range(n)
        )
        mu_star = tuple(
            sum((sel[k].T @ hs.get_star(mu, k) for k in range(1, n)), sel[0].T @ hs.get_star(mu, 0)) for mu in range(n)
        )
        return Slots(o, o_star, mu_slots, mu_star)

    x = as_points(points, n)
    o, _, div, _ = slot_flux(sampler, x, n, backend, step)
    d = o - div
    stable = gauge_el_residual(G, a, x, "dagger_stable", backend, step)
    worst = 0.0
    for k in range(n):
        block = d[:, :, k * c:(k + 1) * c]
        candidate = -dagger(ortho_project(a.algebra, dagger(block)))
        worst = max(worst, max_frobenius(candidate - stable[k]))
    return worst

