"""app.noether

Infinitesimal symmetries of proto-Lagrangians and the conservation laws they
produce.

Every flux carries two samplers: its components V^mu and the divergence the
off-shell identity predicts for it, i.e. minus the pairing of the
Euler-Lagrange residuals with the flow direction. On solutions that pairing
vanishes; on arbitrary fields `offshell_identity_defect` compares it with a
finite-difference divergence and checks the convergence order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Literal, Sequence

import numpy as np
import numpy.typing as npt
from scipy import linalg

from app.contracts.models import DerivativeBackend, FluxKind
from app.errors import DimensionError, EvaluationError, PreconditionError, ValidationError
from app.fields import (
    Field,
    GaugeConfig,
    Grid,
    as_points,
    first_order_residual,
    grid_divergence,
    observed_order,
    stencil_divergence,
)
from app.gauge_lagrangian import (
    GaugeProtoLagrangian,
    GaugeSlotPoint,
    covariant_derivs,
    current_condition_defect,
    extended_el_matter,
    gauge_el_residual,
    gauge_slot_dagger_defect,
)
from app.lagrangian import ProtoLagrangian, SlotPoint, el_residual_holomorphic, mtr
from app.lie import LieAlgebraSpec, dagger_stable, membership_defect
from app.matcore import as_cmatrix, as_rng, commutator, dagger, matrix_from_json, max_frobenius, re_inner

SYMMETRY_STEP = 1e-5


# linear maps on r x c matrices


def _vec(x: np.ndarray) -> np.ndarray:
    flat = x.reshape(x.shape[:-2] + (-1,))
    return np.concatenate([np.real(flat), np.imag(flat)], axis=-1)


def _unvec(v: np.ndarray, rows: int, cols: int) -> np.ndarray:
    n = rows * cols
    return (v[..., :n] + 1j * v[..., n:]).reshape(v.shape[:-1] + (rows, cols))


@dataclass(frozen=True, eq=False)
class LinearMap:
    """Real-linear map X -> left X right on r x c matrices, or a general real
    matrix acting on [Re vec X, Im vec X] (row-major vec)."""

    rows: int
    cols: int
    left: np.ndarray | None = None
    right: np.ndarray | None = None
    real_matrix: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.real_matrix is not None:
            m = np.asarray(self.real_matrix, dtype=float)
            n = 2 * self.rows * self.cols
            if m.shape != (n, n):
                raise DimensionError(f"real map on {self.rows}x{self.cols} matrices must be {n}x{n}, got {m.shape}")
            object.__setattr__(self, "real_matrix", m)
        if self.left is not None and np.shape(self.left) != (self.rows, self.rows):
            raise DimensionError(f"left factor must be {self.rows}x{self.rows}")
        if self.right is not None and np.shape(self.right) != (self.cols, self.cols):
            raise DimensionError(f"right factor must be {self.cols}x{self.cols}")

    @staticmethod
    def zero(rows: int, cols: int) -> "LinearMap":
        return LinearMap(rows, cols, real_matrix=np.zeros((2 * rows * cols,) * 2))

    @staticmethod
    def identity(rows: int, cols: int) -> "LinearMap":
        return LinearMap(rows, cols, real_matrix=np.eye(2 * rows * cols))

    @staticmethod
    def left_mult(k: npt.ArrayLike, cols: int) -> "LinearMap":
        km = as_cmatrix(k)
        return LinearMap(km.shape[0], cols, left=km)

    @staticmethod
    def right_mult(b: npt.ArrayLike, rows: int) -> "LinearMap":
        bm = as_cmatrix(b)
        return LinearMap(rows, bm.shape[0], right=bm)

    @staticmethod
    def from_config(obj: dict[str, Any] | None, rows: int, cols: int) -> "LinearMap":
        """`{"left": M}`, `{"right": M}`, both, `{"real": M}` or None for the zero map."""
        if not obj:
            return LinearMap.zero(rows, cols)
        if "real" in obj:
            return LinearMap(rows, cols, real_matrix=np.asarray(obj["real"], dtype=float))
        left = matrix_from_json(obj["left"]) if "left" in obj else None
        right = matrix_from_json(obj["right"]) if "right" in obj else None
        if left is None and right is None:
            raise ValidationError("linear map config needs 'left', 'right' or 'real'")
        return LinearMap(rows, cols, left, right)

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.complex128)
        if self.real_matrix is not None:
            return _unvec(_vec(x) @ self.real_matrix.T, self.rows, self.cols)
        out = np.zeros_like(x)
        if self.left is not None:
            out = out + self.left @ x
        if self.right is not None:
            out = out + x @ self.right
        return out

    def matrix(self) -> np.ndarray:
        """Real matrix of the map on [Re vec X, Im vec X]."""
        if self.real_matrix is not None:
            return self.real_matrix
        n = self.rows * self.cols
        units = _unvec(np.eye(2 * n), self.rows, self.cols)
        return _vec(self.apply(units)).T

    def flow(self, s: float, x: np.ndarray, linearized: bool = False) -> np.ndarray:
        """exp(sK) X, or (I + sK) X when `linearized`."""
        m = self.matrix()
        step = np.eye(len(m)) + s * m if linearized else linalg.expm(s * m)
        return _unvec(_vec(np.asarray(x, dtype=np.complex128)) @ step.T, self.rows, self.cols)


@dataclass(frozen=True, eq=False)
class SymmetryCandidate:
    """Generators of a candidate symmetry.

    `k` acts on psi. The derivative slots flow with L^lam_mu = delta K + a_ext[lam, mu] Id
    unless `l_maps[lam][mu]` is given. The base point flows by x -> -s a + exp(s a_ext) x.
    """

    k: LinearMap
    n_dims: int
    a_vec: np.ndarray = field(default=None)  # type: ignore[assignment]
    a_ext: np.ndarray = field(default=None)  # type: ignore[assignment]
    l_maps: Sequence[Sequence[LinearMap]] | None = None

    def __post_init__(self) -> None:
        n = self.n_dims
        a = np.zeros(n) if self.a_vec is None else np.asarray(self.a_vec, dtype=float)
        ext = np.zeros((n, n)) if self.a_ext is None else np.asarray(self.a_ext, dtype=float)
        if a.shape != (n,) or ext.shape != (n, n):
            raise DimensionError(f"candidate needs a in R^{n} and A in R^{n}x{n}")
        object.__setattr__(self, "a_vec", a)
        object.__setattr__(self, "a_ext", ext)

    def slot_generator(self) -> np.ndarray:
        """Block real matrix of the flow of (R_1, .., R_N)."""
        n = self.n_dims
        km = self.k.matrix()
        size = len(km)
        big = np.zeros((n * size, n * size))
        for mu in range(n):
            for lam in range(n):
                if self.l_maps is not None:
                    block = self.l_maps[lam][mu].matrix()
                else:
                    block = self.a_ext[lam, mu] * np.eye(size) + (km if lam == mu else 0.0)
                big[mu * size:(mu + 1) * size, lam * size:(lam + 1) * size] = block
        return big


@dataclass(frozen=True)
class SymmetryDefect:
    """Largest |dL/ds| at s = 0 under the exponential flow and under I + sK."""

    exponential: float
    linearized: float

    @property
    def worst(self) -> float:
        return max(self.exponential, self.linearized)

    @property
    def agreement(self) -> float:
        return abs(self.exponential - self.linearized)


def _flowed_point(sp: SlotPoint, cand: SymmetryCandidate, s: float, linearized: bool) -> SlotPoint:
    p = cand.k.flow(s, sp.p, linearized)
    big = cand.slot_generator()
    step = np.eye(len(big)) + s * big if linearized else linalg.expm(s * big)
    stacked = np.concatenate([_vec(np.asarray(r)) for r in sp.r], axis=-1) @ step.T
    size = 2 * cand.k.rows * cand.k.cols
    rs = tuple(_unvec(stacked[..., mu * size:(mu + 1) * size], cand.k.rows, cand.k.cols) for mu in range(cand.n_dims))
    return sp.replace(p=p, qt=dagger(p), r=rs, st=tuple(dagger(v) for v in rs))


def internal_symmetry_defect(
    L: ProtoLagrangian,
    cand: SymmetryCandidate,
    seed: int | np.random.Generator | None = 0,
    samples: int = 20,
    step: float = SYMMETRY_STEP,
) -> SymmetryDefect:
    if (cand.k.rows, cand.k.cols) != (L.r, L.c) or cand.n_dims != L.n_dims:
        raise DimensionError(f"candidate acts on {cand.k.rows}x{cand.k.cols}, N={cand.n_dims}; {L.name} has {L.r}x{L.c}, N={L.n_dims}")
    sp = SlotPoint.random(seed, L.r, L.c, L.n_dims, samples)

    def rate(linearized: bool) -> float:
        plus = np.asarray(L.value(_flowed_point(sp, cand, step, linearized)))
        minus = np.asarray(L.value(_flowed_point(sp, cand, -step, linearized)))
        return float(np.max(np.abs(plus - minus))) / (2 * step)

    return SymmetryDefect(rate(False), rate(True))


@dataclass(frozen=True)
class ExternalDefect:
    # central difference along x -> -s a + exp(s A) x
    flow: float
    # |L^(nabla) . (A x - a)|
    gradient: float

    @property
    def worst(self) -> float:
        return max(self.flow, self.gradient)

    @property
    def consistency(self) -> float:
        return abs(self.flow - self.gradient)


def external_symmetry_defect(
    L: ProtoLagrangian,
    cand: SymmetryCandidate,
    seed: int | np.random.Generator | None = 0,
    samples: int = 20,
    step: float = SYMMETRY_STEP,
) -> ExternalDefect:
    sp = SlotPoint.random(seed, L.r, L.c, L.n_dims, samples)
    a, ext = cand.a_vec, cand.a_ext

    def moved(s: float) -> np.ndarray:
        x = sp.x @ linalg.expm(s * ext).T - s * a
        return np.asarray(L.value(sp.replace(x=x)))

    flow = np.abs(moved(step) - moved(-step)) / (2 * step)
    direction = sp.x @ ext.T - a
    grad = np.abs(np.sum(L.grad_x(sp) * direction, axis=1))
    return ExternalDefect(float(np.max(flow)), float(np.max(grad)))


def gauge_conjugation_defect(
    G: GaugeProtoLagrangian,
    algebra: LieAlgebraSpec,
    b: np.ndarray,
    seed: int | np.random.Generator | None = 0,
    samples: int = 20,
    step: float = SYMMETRY_STEP,
) -> float:
    """max |dG/ds| at s = 0 under P -> exp(-sB) P exp(sB) on g-valued samples."""
    sp = GaugeSlotPoint.random(algebra, G.n_dims, samples, seed)

    def moved(s: float) -> np.ndarray:
        u = linalg.expm(s * b)
        ui = linalg.expm(-s * b)
        p = {pair: ui @ v @ u for pair, v in sp.p.items()}
        return np.asarray(G.value(GaugeSlotPoint(p, {pair: dagger(v) for pair, v in p.items()}, sp.x)))

    return float(np.max(np.abs(moved(step) - moved(-step)))) / (2 * step)


# conservation laws


Sampler = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class NoetherFlux:
    """A vector field V^mu with the divergence predicted by the off-shell identity.

    `sampler(points)` returns (N, P) components; `predicted(points)` returns (P,).
    Non-periodic fluxes (explicit x factors) are differentiated by stencils at
    shifted points instead of on the periodic grid.
    """

    kind: FluxKind
    n_dims: int
    sampler: Sampler
    predicted: Sampler
    periodic: bool = True
    provenance: dict[str, Any] = field(default_factory=dict)
    preconditions: dict[str, float] = field(default_factory=dict)

    def components(self, points: npt.ArrayLike) -> np.ndarray:
        x = as_points(points, self.n_dims)
        v = np.asarray(self.sampler(x))
        if v.shape != (self.n_dims, len(x)):
            raise DimensionError(f"{self.kind} flux has shape {v.shape}, expected {(self.n_dims, len(x))}")
        if not np.all(np.isfinite(v)):
            idx = int(np.argmax(~np.isfinite(v).all(axis=0)))
            raise EvaluationError(f"{self.kind} flux is not finite", x[idx].tolist())
        return v

    def divergence(self, grid: Grid) -> np.ndarray:
        pts = grid.points()
        if self.periodic:
            return grid_divergence(self.components(pts), grid)
        return stencil_divergence(self.components, pts, grid.h)


@dataclass(frozen=True)
class DivergenceReport:
    h: list[float]
    max_abs: list[float]
    order: float | None

    @property
    def finest(self) -> float:
        return self.max_abs[-1]


def _refinement(grid: Grid, levels: int, measure: Callable[[Grid], float]) -> DivergenceReport:
    if levels < 1:
        raise ValidationError(f"need at least one grid level, got {levels}")
    hs, vals = [], []
    g = grid
    for _ in range(levels):
        hs.append(float(np.max(g.h)))
        vals.append(measure(g))
        g = g.refine()
    order = observed_order(vals[-2], vals[-1]) if levels >= 2 else None
    return DivergenceReport(hs, vals, order)


def divergence_defect(flux: NoetherFlux, grid: Grid, levels: int = 2) -> DivergenceReport:
    """max |div V| on `grid` and its refinements, with the observed order of the last step."""
    return _refinement(grid, levels, lambda g: float(np.max(np.abs(flux.divergence(g)))))


def offshell_identity_defect(flux: NoetherFlux, grid: Grid, levels: int = 2) -> DivergenceReport:
    """max |div V - predicted| on `grid` and its refinements; holds for arbitrary fields."""

    def measure(g: Grid) -> float:
        return float(np.max(np.abs(flux.divergence(g) - flux.predicted(g.points()))))

    return _refinement(grid, levels, measure)


def _require(name: str, defect: float, tol: float) -> float:
    if defect > tol:
        raise PreconditionError(f"precondition '{name}' failed (tolerance {tol:.1e})", defect)
    return defect


def _backend(L: ProtoLagrangian) -> DerivativeBackend:
    return "exact" if L.jet_capable else "fd"


def conserved_current_violations(
    k: np.ndarray,
    gammas: Sequence[np.ndarray],
    mass: np.ndarray,
    tol: float = 1e-10,
) -> list[str]:
    """Named conditions on (K, Gamma^mu, M) that fail.

    i:   K Gamma^mu is Hermitian
    ii:  d_mu (K Gamma^mu) = 0, automatic for constant coefficients
    iii: K M + M^+ K^+ = 0
    """
    out = []
    for mu, g in enumerate(gammas):
        kg = k @ g
        if max_frobenius(kg - dagger(kg)) > tol:
            out.append(f"i: K Gamma^{mu} is not Hermitian")
    if max_frobenius(k @ mass + dagger(mass) @ dagger(k)) > tol:
        out.append("iii: K M + M^+ K^+ != 0")
    return out


def flux_conserved_current(
    psi: Field,
    k: npt.ArrayLike,
    gammas: Sequence[npt.ArrayLike],
    mass: npt.ArrayLike,
    a: GaugeConfig,
    points_check: npt.ArrayLike | None = None,
    seed: int = 0,
    samples: int = 20,
) -> NoetherFlux:
    """V^mu = Tr(J^-1 psi^+ K Gamma^mu psi) for Gamma^mu (d_mu psi + psi A_mu) + M psi = 0.

    Gauge membership is checked at `points_check`, or at `samples` random
    points on the torus drawn from `seed`.
    """
    km = as_cmatrix(k)
    gs = [as_cmatrix(g) for g in gammas]
    mm = as_cmatrix(mass)
    violations = conserved_current_violations(km, gs, mm)
    if violations:
        raise ValidationError("; ".join(violations))
    if a.algebra.j is None:
        raise ValidationError("the conserved current needs an algebra defined by J")
    if len(gs) != a.n_dims or psi.shape.cols != a.c:
        raise DimensionError("Gamma count, gauge dimension and matter columns must agree")
    if points_check is None:
        points_check = as_rng(seed).uniform(0.0, 2 * np.pi, size=(samples, a.n_dims))
    membership = a.check_membership(as_points(points_check, a.n_dims))
    ji = np.linalg.inv(a.algebra.j)
    residual = first_order_residual(psi, a, gs, mm)

    def sampler(x: np.ndarray) -> np.ndarray:
        p = psi.values(x)
        pd_ = dagger(p)
        return np.stack([mtr(ji @ pd_ @ km @ g @ p) for g in gs])

    def predicted(x: np.ndarray) -> np.ndarray:
        p = psi.values(x)
        e = residual.values(x)
        return mtr(ji @ dagger(p) @ km @ e) + mtr(ji @ dagger(e) @ dagger(km) @ p)

    return NoetherFlux("conserved_current", a.n_dims, sampler, predicted, True,
                       {"K": km, "J": a.algebra.j}, {"gauge_membership": membership})


def _matter_flux(
    kind: FluxKind,
    L: ProtoLagrangian,
    psi: Field,
    direction: Callable[[np.ndarray], np.ndarray],
    extra: Callable[[np.ndarray, np.ndarray], np.ndarray],
    periodic: bool,
    provenance: dict[str, Any],
    preconditions: dict[str, float],
) -> NoetherFlux:
    """V^mu = Tr[L^(mu) d + L^(mu*) d^+] + extra^mu(x, L_psi); predicted div = -(Tr[D d] + Tr[D^+ d^+])."""
    backend = _backend(L)

    def sampler(x: np.ndarray) -> np.ndarray:
        sp = SlotPoint.from_field(psi, x)
        s = L.slots(sp).batched(len(x))
        d = direction(x)
        dd = dagger(d)
        base = np.stack([mtr(s.mu[mu] @ d) + mtr(s.mu_star[mu] @ dd) for mu in range(L.n_dims)])
        return base + extra(x, np.asarray(L.value(sp)))

    def predicted(x: np.ndarray) -> np.ndarray:
        res, res_c = el_residual_holomorphic(L, psi, x, backend)
        d = direction(x)
        return -(mtr(res @ d) + mtr(res_c @ dagger(d)))

    return NoetherFlux(kind, L.n_dims, sampler, predicted, periodic, provenance, preconditions)


def flux_translation(
    L: ProtoLagrangian,
    psi: Field,
    cand: SymmetryCandidate,
    tol: float = 1e-8,
    seed: int = 0,
) -> NoetherFlux:
    """d = K psi - a^l d_l psi, V^mu = Tr[L^(mu) d + L^(mu*) d^+] + a^mu L_psi."""
    L.check_field(psi)
    plain = SymmetryCandidate(cand.k, cand.n_dims, a_vec=cand.a_vec)
    pre = {
        "internal": _require("internal symmetry", internal_symmetry_defect(L, plain, seed).worst, tol),
        "external": _require("external symmetry", external_symmetry_defect(L, plain, seed).worst, tol),
    }
    a = plain.a_vec
    partials = [psi.partial(mu) for mu in range(L.n_dims)]

    def direction(x: np.ndarray) -> np.ndarray:
        d = plain.k.apply(psi.values(x))
        for lam in range(L.n_dims):
            if a[lam]:
                d = d - a[lam] * partials[lam].values(x)
        return d

    def extra(x: np.ndarray, value: np.ndarray) -> np.ndarray:
        return a[:, None] * value[None, :]

    return _matter_flux("translation", L, psi, direction, extra, True, {"a": a.tolist()}, pre)


def flux_internal(L: ProtoLagrangian, psi: Field, k: LinearMap, tol: float = 1e-8, seed: int = 0) -> NoetherFlux:
    """V^mu = Tr[L^(mu) K psi + L^(mu*) (K psi)^+]."""
    flux = flux_translation(L, psi, SymmetryCandidate(k, L.n_dims), tol, seed)
    return NoetherFlux("internal", flux.n_dims, flux.sampler, flux.predicted, True, {}, flux.preconditions)


def flux_dilation(
    L: ProtoLagrangian,
    psi: Field,
    cand: SymmetryCandidate,
    tol: float = 1e-8,
    seed: int = 0,
) -> NoetherFlux:
    """d = K psi + (A x)^a d_a psi, V^mu = Tr[L^(mu) d + L^(mu*) d^+] - (A x)^mu L_psi."""
    L.check_field(psi)
    ext = cand.a_ext
    if abs(np.trace(ext)) > 1e-12:
        raise ValidationError(f"dilation generator must be trace free, Tr A = {np.trace(ext):.3e}")
    dil = SymmetryCandidate(cand.k, cand.n_dims, a_ext=ext)
    pre = {
        "internal": _require("internal symmetry", internal_symmetry_defect(L, dil, seed).worst, tol),
        "external": _require("external symmetry", external_symmetry_defect(L, dil, seed).worst, tol),
    }
    partials = [psi.partial(mu) for mu in range(L.n_dims)]

    def direction(x: np.ndarray) -> np.ndarray:
        ax = x @ ext.T
        d = dil.k.apply(psi.values(x))
        for alpha in range(L.n_dims):
            if np.any(ext[alpha]):
                d = d + ax[:, alpha, None, None] * partials[alpha].values(x)
        return d

    def extra(x: np.ndarray, value: np.ndarray) -> np.ndarray:
        return -(x @ ext.T).T * value[None, :]

    return _matter_flux("dilation", L, psi, direction, extra, False, {"A": ext.tolist()}, pre)


def _gauge_setup(G: GaugeProtoLagrangian, a: GaugeConfig, tol: float, seed: int) -> dict[str, float]:
    G.check_config(a)
    if not dagger_stable(a.algebra):
        raise PreconditionError(f"gauge fluxes need g^dagger = g; {a.algebra.kind} is not")
    return {"slot_dagger": _require("slot dagger relation", gauge_slot_dagger_defect(G, a.algebra, seed), tol)}


def _projected_hats(G: GaugeProtoLagrangian, a: GaugeConfig, x: np.ndarray) -> list[list[np.ndarray]]:
    hs = G.hat(GaugeSlotPoint.from_config(a, x))
    b = len(x)
    out = []
    for mu in range(G.n_dims):
        row = []
        for k in range(G.n_dims):
            m = np.broadcast_to(np.asarray(hs.get(mu, k)), (b, G.c, G.c))
            row.append(a.algebra.project(m))
        out.append(row)
    return out


def _gauge_value(G: GaugeProtoLagrangian, a: GaugeConfig, x: np.ndarray) -> np.ndarray:
    return np.asarray(G.value(GaugeSlotPoint.from_config(a, x)))


def _gauge_residual(G: GaugeProtoLagrangian, a: GaugeConfig, x: np.ndarray) -> list[np.ndarray]:
    return gauge_el_residual(G, a, x, "dagger_stable", "exact" if G.jet_capable else "fd")


def _gauge_partials(a: GaugeConfig) -> list[list[Field]]:
    """d_l A_k indexed [l][k]."""
    return [[a[k].partial(lam) for k in range(a.n_dims)] for lam in range(a.n_dims)]


def flux_gauge_translation(
    G: GaugeProtoLagrangian,
    a: GaugeConfig,
    a_vec: npt.ArrayLike,
    tol: float = 1e-8,
    seed: int = 0,
) -> NoetherFlux:
    """W_k = a^l d_l A_k, V^mu = 2 Re sum_k Tr[Pi G^(mu k) W_k] - a^mu G_A,
    predicted div = 2 Re sum_k Tr[R_k W_k] with R the gauge residual."""
    pre = _gauge_setup(G, a, tol, seed)
    av = np.asarray(a_vec, dtype=float)
    if av.shape != (G.n_dims,):
        raise DimensionError(f"translation vector must have {G.n_dims} entries")
    sp = GaugeSlotPoint.random(a.algebra, G.n_dims, 20, seed)
    pre["gradient"] = _require("G^(nabla) . a = 0", float(np.max(np.abs(G.grad_x(sp) @ av))), tol)
    dA = _gauge_partials(a)

    def w(x: np.ndarray) -> list[np.ndarray]:
        out = []
        for k in range(G.n_dims):
            acc = np.zeros((len(x), G.c, G.c), dtype=np.complex128)
            for lam in range(G.n_dims):
                if av[lam]:
                    acc = acc + av[lam] * dA[lam][k].values(x)
            out.append(acc)
        return out

    def sampler(x: np.ndarray) -> np.ndarray:
        ph = _projected_hats(G, a, x)
        ws = w(x)
        value = _gauge_value(G, a, x)
        comps = [2 * np.real(sum(mtr(ph[mu][k] @ ws[k]) for k in range(G.n_dims))) - av[mu] * value
                 for mu in range(G.n_dims)]
        return np.stack(comps)

    def predicted(x: np.ndarray) -> np.ndarray:
        res = _gauge_residual(G, a, x)
        ws = w(x)
        return 2 * np.real(sum(mtr(res[k] @ ws[k]) for k in range(G.n_dims)))

    return NoetherFlux("gauge_translation", G.n_dims, sampler, predicted, True, {"a": av.tolist()}, pre)


def dilation_remainder(G: GaugeProtoLagrangian, a: GaugeConfig, s: np.ndarray, x: np.ndarray) -> np.ndarray:
    """C = Re sum_(mu nu) Tr[Pi G^(mu nu) sum_a S[a, mu] d_a A_nu]."""
    ph = _projected_hats(G, a, x)
    dA = _gauge_partials(a)
    out = np.zeros(len(x))
    for mu in range(G.n_dims):
        for nu in range(G.n_dims):
            if mu == nu:
                continue
            acc = np.zeros((len(x), G.c, G.c), dtype=np.complex128)
            for alpha in range(G.n_dims):
                if s[alpha, mu]:
                    acc = acc + s[alpha, mu] * dA[alpha][nu].values(x)
            out = out + np.real(mtr(ph[mu][nu] @ acc))
    return out


def _dilation_generator(G: GaugeProtoLagrangian, s: npt.ArrayLike) -> np.ndarray:
    sm = np.asarray(s, dtype=float)
    if sm.shape != (G.n_dims, G.n_dims):
        raise DimensionError(f"dilation generator must be {G.n_dims}x{G.n_dims}")
    if abs(np.trace(sm)) > 1e-12:
        raise ValidationError(f"dilation generator must be trace free, Tr S = {np.trace(sm):.3e}")
    return sm


def _gauge_dilation_flux(
    G: GaugeProtoLagrangian,
    a: GaugeConfig,
    sm: np.ndarray,
    with_remainder: bool,
    provenance: dict[str, Any],
    pre: dict[str, float],
) -> NoetherFlux:
    dA = _gauge_partials(a)

    def w(x: np.ndarray) -> list[np.ndarray]:
        sx = x @ sm.T
        out = []
        for k in range(G.n_dims):
            acc = np.zeros((len(x), G.c, G.c), dtype=np.complex128)
            for alpha in range(G.n_dims):
                if np.any(sm[alpha]):
                    acc = acc + sx[:, alpha, None, None] * dA[alpha][k].values(x)
            out.append(acc)
        return out

    def sampler(x: np.ndarray) -> np.ndarray:
        ph = _projected_hats(G, a, x)
        ws = w(x)
        value = _gauge_value(G, a, x)
        sx = x @ sm.T
        comps = [2 * np.real(sum(mtr(ph[mu][k] @ ws[k]) for k in range(G.n_dims))) - sx[:, mu] * value
                 for mu in range(G.n_dims)]
        return np.stack(comps)

    def predicted(x: np.ndarray) -> np.ndarray:
        res = _gauge_residual(G, a, x)
        ws = w(x)
        out = 2 * np.real(sum(mtr(res[k] @ ws[k]) for k in range(G.n_dims)))
        if with_remainder:
            out = out + 2 * dilation_remainder(G, a, sm, x)
        return out

    return NoetherFlux("gauge_dilation", G.n_dims, sampler, predicted, False, provenance, pre)


def _dilation_gradient(G: GaugeProtoLagrangian, sm: np.ndarray, sp: GaugeSlotPoint, tol: float) -> float:
    direction = sp.x @ sm.T
    return _require("G^(nabla) . S x = 0", float(np.max(np.abs(np.sum(G.grad_x(sp) * direction, axis=1)))), tol)


def flux_gauge_dilation(
    G: GaugeProtoLagrangian,
    a: GaugeConfig,
    s: npt.ArrayLike,
    tol: float = 1e-8,
    seed: int = 0,
    points_check: npt.ArrayLike | None = None,
) -> NoetherFlux:
    """W_k = (S x)^a d_a A_k, V^mu = 2 Re sum_k Tr[Pi G^(mu k) W_k] - (S x)^mu G_A,
    predicted div = 2 Re sum_k Tr[R_k W_k].

    Refuses unless `dilation_remainder` vanishes at `points_check`, or at the
    random points the gradient condition is sampled on.
    """
    sm = _dilation_generator(G, s)
    pre = _gauge_setup(G, a, tol, seed)
    sp = GaugeSlotPoint.random(a.algebra, G.n_dims, 20, seed)
    pre["gradient"] = _dilation_gradient(G, sm, sp, tol)
    x_check = as_points(points_check if points_check is not None else sp.x, G.n_dims)
    pre["remainder"] = _require("dilation remainder", float(np.max(np.abs(dilation_remainder(G, a, sm, x_check)))), tol)
    return _gauge_dilation_flux(G, a, sm, False, {"S": sm.tolist()}, pre)


def gauge_dilation_diagnostic(
    G: GaugeProtoLagrangian,
    a: GaugeConfig,
    s: npt.ArrayLike,
    tol: float = 1e-8,
    seed: int = 0,
) -> NoetherFlux:
    """The gauge dilation flux without the remainder condition.

    Its predicted divergence carries the extra 2 C from `dilation_remainder`,
    so the divergence identity can be measured on configurations that
    `flux_gauge_dilation` refuses. The sampled remainder is recorded under
    `preconditions["remainder"]` without being enforced. Not a conservation law.
    """
    sm = _dilation_generator(G, s)
    pre = _gauge_setup(G, a, tol, seed)
    sp = GaugeSlotPoint.random(a.algebra, G.n_dims, 20, seed)
    pre["gradient"] = _dilation_gradient(G, sm, sp, tol)
    pre["remainder"] = float(np.max(np.abs(dilation_remainder(G, a, sm, sp.x))))
    return _gauge_dilation_flux(G, a, sm, True, {"S": sm.tolist(), "remainder": "predicted"}, pre)


def _check_in_algebra(algebra: LieAlgebraSpec, b: np.ndarray, tol: float = 1e-10) -> None:
    d = membership_defect(algebra, b)
    if d > tol:
        raise ValidationError(f"B is not in the gauge algebra (defect {d:.3e})")


def flux_gauge_internal(
    G: GaugeProtoLagrangian,
    a: GaugeConfig,
    b: npt.ArrayLike,
    tol: float = 1e-8,
    seed: int = 0,
) -> NoetherFlux:
    """V^mu = Re sum_nu Tr[G^(mu nu) [B, A_nu]], predicted div = Re sum_nu Tr[R_nu [B, A_nu]]."""
    bm = as_cmatrix(b)
    _check_in_algebra(a.algebra, bm)
    pre = _gauge_setup(G, a, tol, seed)
    pre["conjugation"] = _require("conjugation invariance", gauge_conjugation_defect(G, a.algebra, bm, seed), tol)

    def w(x: np.ndarray) -> list[np.ndarray]:
        return [commutator(bm, a[nu].values(x)) for nu in range(G.n_dims)]

    def sampler(x: np.ndarray) -> np.ndarray:
        hs = G.hat(GaugeSlotPoint.from_config(a, x))
        ws = w(x)
        return np.stack([
            np.real(sum(mtr(np.asarray(hs.get(mu, nu)) @ ws[nu]) for nu in range(G.n_dims)))
            for mu in range(G.n_dims)
        ])

    def predicted(x: np.ndarray) -> np.ndarray:
        res = _gauge_residual(G, a, x)
        ws = w(x)
        return np.real(sum(mtr(res[nu] @ ws[nu]) for nu in range(G.n_dims)))

    return NoetherFlux("gauge_internal", G.n_dims, sampler, predicted, True, {"B": bm}, pre)


def flux_combined(
    L: ProtoLagrangian,
    G: GaugeProtoLagrangian,
    psi: Field,
    a: GaugeConfig,
    b: npt.ArrayLike,
    tol: float = 1e-8,
    seed: int = 0,
) -> NoetherFlux:
    """Matter and gauge field under psi -> psi exp(sB), A -> exp(-sB) A exp(sB).

    V^mu = Tr[L^(mu) psi B] + Tr[L^(mu*) B^+ psi^+] + 2 Re sum_k Tr[Pi G^(mu k) [A_k, B]]
    with the slots of the statically extended Lagrangian.
    """
    bm = as_cmatrix(b)
    _check_in_algebra(a.algebra, bm)
    L.check_field(psi)
    pre = _gauge_setup(G, a, tol, seed)
    pre["current_condition"] = _require("current condition", current_condition_defect(L, a.algebra, seed), tol)
    pre["matter_invariance"] = _require(
        "matter invariance",
        internal_symmetry_defect(L, SymmetryCandidate(LinearMap.right_mult(bm, L.r), L.n_dims), seed).worst,
        tol,
    )
    pre["conjugation"] = _require("conjugation invariance", gauge_conjugation_defect(G, a.algebra, bm, seed), tol)
    derivs = covariant_derivs(psi, a)
    backend = _backend(L)
    n = L.n_dims

    def w(x: np.ndarray) -> list[np.ndarray]:
        return [commutator(a[k].values(x), bm) for k in range(n)]

    def sampler(x: np.ndarray) -> np.ndarray:
        sp = SlotPoint.from_field(psi, x, derivs)
        s = L.slots(sp).batched(len(x))
        pb = np.asarray(sp.p) @ bm
        ph = _projected_hats(G, a, x)
        ws = w(x)
        comps = []
        for mu in range(n):
            matter = mtr(s.mu[mu] @ pb) + mtr(s.mu_star[mu] @ dagger(pb))
            gauge = 2 * np.real(sum(mtr(ph[mu][k] @ ws[k]) for k in range(n)))
            comps.append(matter + gauge)
        return np.stack(comps)

    def predicted(x: np.ndarray) -> np.ndarray:
        ext = extended_el_matter(L, psi, a, x, backend)
        res = _gauge_residual(G, a, x)
        pb = psi.values(x) @ bm
        ws = w(x)
        out = -(mtr(ext.matter @ pb) + mtr(ext.matter_conjugate @ dagger(pb)))
        for k in range(n):
            out = out - re_inner(ext.gauge[k] - 2 * dagger(res[k]), ws[k])
        return out

    return NoetherFlux("combined", n, sampler, predicted, True, {"B": bm}, pre)


FLUX_KINDS: tuple[str, ...] = (
    "conserved_current",
    "translation",
    "dilation",
    "internal",
    "gauge_translation",
    "gauge_dilation",
    "gauge_internal",
    "combined",
)

Role = Literal["matter", "gauge", "both"]

FLUX_ROLES: dict[str, Role] = {
    "conserved_current": "matter",
    "translation": "matter",
    "dilation": "matter",
    "internal": "matter",
    "gauge_translation": "gauge",
    "gauge_dilation": "gauge",
    "gauge_internal": "gauge",
    "combined": "both",
}


def flux_scale(flux: NoetherFlux, grid: Grid) -> float:
    return max(1.0, float(np.max(np.abs(flux.components(grid.points())))))
