"""app.lagrangian

Matter-field proto-Lagrangians L(P; Q^T; R_1..R_N; S_1^T..S_N^T; x) and their
Euler-Lagrange residuals.

P and R_mu are r x c, Q^T and S_mu^T are c x r. The arguments are treated as
independent complex variables; a density is obtained by substituting psi,
psi^dagger, d_mu psi and d_mu psi^dagger.

Derivative slots are stored transposed with respect to their argument,
[L^(o)]_ij = dL/dP_ji, so the linearization reads Tr[L^(o) H]. Slot and value
functions use only matrix products, sums and `mtr`, so the same code runs on
batched arrays and on `Jet`s. The "exact" derivative backend relies on that.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
import numpy.typing as npt

from app.contracts.models import DerivativeBackend, RealnessMode
from app.errors import DimensionError, EvaluationError, ValidationError
from app.fields import Field, Grid, Jet, as_jet, as_points, grid_divergence, observed_order
from app.matcore import as_rng, dagger, matrix_from_json, max_frobenius, random_cmatrix

SLOT_STEP = 1e-5
OUTER_STEP = 1e-3


def mtr(m: Any) -> Any:
    """Trace over the matrix axes. Jets keep a 1x1 matrix shape."""
    if isinstance(m, Jet):
        return m.mtrace()
    return np.trace(m, axis1=-2, axis2=-1)


def _entry(d: Any) -> Any:
    return d if isinstance(d, Jet) else np.asarray(d)[..., None, None]


def _unit(rows: int, cols: int, i: int, j: int, scale: complex = 1.0) -> np.ndarray:
    e = np.zeros((rows, cols), dtype=np.complex128)
    e[i, j] = scale
    return e


def as_batch(m: Any, batch: int) -> np.ndarray:
    """Materialize a slot (array or jet value) as a (batch, rows, cols) array."""
    if isinstance(m, Jet):
        m = m.value
    a = np.asarray(m, dtype=np.complex128)
    return np.broadcast_to(a, (batch,) + a.shape[-2:]).copy()


def zeros_like_slot(m: Any) -> Any:
    if isinstance(m, Jet):
        return Jet.constant(np.zeros(m.value.shape[-2:], dtype=np.complex128))
    return np.zeros_like(np.asarray(m, dtype=np.complex128))


@dataclass(frozen=True, eq=False)
class SlotPoint:
    """Arguments of a proto-Lagrangian at a batch of points."""

    p: Any
    qt: Any
    r: tuple
    st: tuple
    x: np.ndarray
    jets: bool = False

    @property
    def batch(self) -> int:
        return len(self.x)

    @property
    def n_dims(self) -> int:
        return len(self.r)

    def replace(self, **changes: Any) -> "SlotPoint":
        return dataclasses.replace(self, **changes)

    def with_r(self, mu: int, value: Any) -> "SlotPoint":
        r = list(self.r)
        r[mu] = value
        return self.replace(r=tuple(r))

    def with_st(self, mu: int, value: Any) -> "SlotPoint":
        st = list(self.st)
        st[mu] = value
        return self.replace(st=tuple(st))

    @staticmethod
    def from_field(
        psi: Field,
        points: npt.ArrayLike,
        derivs: Sequence[Field] | None = None,
        jets: bool = False,
    ) -> "SlotPoint":
        """Substitute psi and its partials; `derivs` replaces d_mu psi (covariant extensions)."""
        x = as_points(points, psi.n_dims)
        ds = list(derivs) if derivs is not None else [psi.partial(mu) for mu in range(psi.n_dims)]
        if jets:
            pj = psi.jet(x, 2)
            rj = tuple(d.jet(x, 1) for d in ds)
            return SlotPoint(pj, pj.dagger(), rj, tuple(r.dagger() for r in rj), x, True)
        p = psi.values(x)
        rv = tuple(d.values(x) for d in ds)
        return SlotPoint(p, dagger(p), rv, tuple(dagger(v) for v in rv), x)

    @staticmethod
    def random(
        seed: int | np.random.Generator | None,
        r: int,
        c: int,
        n_dims: int,
        count: int,
        scale: float = 1.0,
        tied: bool = True,
    ) -> "SlotPoint":
        """Random slot arguments; `tied` sets Q^T = P^dagger and S_mu^T = R_mu^dagger."""
        rng = as_rng(seed)

        def draw(rows: int, cols: int) -> np.ndarray:
            return np.stack([random_cmatrix(rng, rows, cols, scale) for _ in range(count)])

        p = draw(r, c)
        rs = tuple(draw(r, c) for _ in range(n_dims))
        qt = dagger(p) if tied else draw(c, r)
        st = tuple(dagger(v) for v in rs) if tied else tuple(draw(c, r) for _ in range(n_dims))
        x = rng.uniform(0.0, 2 * np.pi, size=(count, n_dims))
        return SlotPoint(p, qt, rs, st, x)


@dataclass(frozen=True, eq=False)
class Slots:
    """Derivative slots at a batch of points.

    o and mu are c x r, o_star and mu_star are r x c.
    """

    o: Any
    o_star: Any
    mu: tuple
    mu_star: tuple

    def batched(self, batch: int) -> "Slots":
        return Slots(
            as_batch(self.o, batch),
            as_batch(self.o_star, batch),
            tuple(as_batch(m, batch) for m in self.mu),
            tuple(as_batch(m, batch) for m in self.mu_star),
        )

    def distance(self, other: "Slots", batch: int) -> float:
        a = self.batched(batch)
        b = other.batched(batch)
        d = max(max_frobenius(a.o - b.o), max_frobenius(a.o_star - b.o_star))
        for x, y in zip(a.mu + a.mu_star, b.mu + b.mu_star):
            d = max(d, max_frobenius(x - y))
        return d


@dataclass(frozen=True, eq=False)
class ProtoLagrangian:
    name: str
    r: int
    c: int
    n_dims: int
    value_fn: Callable[[SlotPoint], Any]
    slot_fn: Callable[[SlotPoint], Slots] | None = None
    grad_x_fn: Callable[[SlotPoint], np.ndarray] | None = None
    # (N, B) vector field w with L - conj(L) = div w
    slack_fn: Callable[[SlotPoint], np.ndarray] | None = None
    realness: RealnessMode = "pointwise"
    x_dependent: bool = False
    origin_zero: bool = True
    jet_capable: bool = True
    expected_equation: str = ""
    params: dict[str, Any] = field(default_factory=dict, repr=False)

    def value(self, sp: SlotPoint) -> Any:
        v = self.value_fn(sp)
        if isinstance(v, Jet):
            return v
        v = np.asarray(v, dtype=np.complex128)
        if not np.all(np.isfinite(v)):
            idx = int(np.argmax(~np.isfinite(np.atleast_1d(v))))
            raise EvaluationError(f"{self.name}: non-finite Lagrangian value", sp.x[idx].tolist())
        return v

    def slots(self, sp: SlotPoint) -> Slots:
        if self.slot_fn is None:
            return numeric_slots(self, sp)
        return self.slot_fn(sp)

    @property
    def has_analytic_slots(self) -> bool:
        return self.slot_fn is not None

    def grad_x(self, sp: SlotPoint, eps: float = SLOT_STEP) -> np.ndarray:
        """L^(nabla), shape (B, N)."""
        if not self.x_dependent:
            return np.zeros((sp.batch, self.n_dims))
        if self.grad_x_fn is not None:
            return np.asarray(self.grad_x_fn(sp))
        cols = []
        for mu in range(self.n_dims):
            dx = np.zeros(self.n_dims)
            dx[mu] = eps
            plus = self.value(sp.replace(x=sp.x + dx))
            minus = self.value(sp.replace(x=sp.x - dx))
            cols.append((plus - minus) / (2 * eps))
        return np.stack(cols, axis=1)

    def check_field(self, psi: Field) -> None:
        if psi.shape.as_tuple() != (self.r, self.c) or psi.n_dims != self.n_dims:
            raise DimensionError(
                f"{self.name} expects {self.r}x{self.c} fields on N={self.n_dims}, "
                f"got {psi.shape.as_tuple()} on N={psi.n_dims}"
            )


@dataclass(frozen=True)
class DensityEvaluation:
    points: np.ndarray
    value: np.ndarray
    slots: Slots


def density(L: ProtoLagrangian, psi: Field, points: npt.ArrayLike, derivs: Sequence[Field] | None = None) -> DensityEvaluation:
    L.check_field(psi)
    sp = SlotPoint.from_field(psi, points, derivs)
    return DensityEvaluation(sp.x, np.asarray(L.value(sp)), L.slots(sp).batched(sp.batch))


# numeric differentiation


def entry_gradient(
    value_at: Callable[[Any], Any],
    base: Any,
    rows: int,
    cols: int,
    eps: float = SLOT_STEP,
) -> Any:
    """Transposed matrix of central differences of `value_at` in each entry of `base`."""
    total = None
    for i in range(rows):
        for j in range(cols):
            e = _unit(rows, cols, i, j, eps)
            d = (value_at(base + e) - value_at(base - e)) / (2 * eps)
            term = _entry(d) * _unit(cols, rows, j, i)
            total = term if total is None else total + term
    return total


def numeric_slots(L: ProtoLagrangian, sp: SlotPoint, eps: float = SLOT_STEP) -> Slots:
    """Central differences in each complex entry with a real step.

    L is holomorphic in every argument, so a real step gives the complex
    partial. P and Q^T are perturbed independently.
    """
    r, c = L.r, L.c
    o = entry_gradient(lambda z: L.value(sp.replace(p=z)), sp.p, r, c, eps)
    o_star = entry_gradient(lambda z: L.value(sp.replace(qt=z)), sp.qt, c, r, eps)
    mu = tuple(
        entry_gradient(lambda z, m=m: L.value(sp.with_r(m, z)), sp.r[m], r, c, eps) for m in range(L.n_dims)
    )
    mu_star = tuple(
        entry_gradient(lambda z, m=m: L.value(sp.with_st(m, z)), sp.st[m], c, r, eps) for m in range(L.n_dims)
    )
    return Slots(o, o_star, mu, mu_star)


def _real_pair(
    L: ProtoLagrangian,
    z: Any,
    w: Any,
    setter: Callable[[Any, Any], SlotPoint],
    rows: int,
    cols: int,
    eps: float,
) -> tuple[Any, Any]:
    re_total = im_total = None
    for i in range(rows):
        for j in range(cols):
            e = _unit(rows, cols, i, j, eps)
            et = e.T
            d_re = (L.value(setter(z + e, w + et)) - L.value(setter(z - e, w - et))) / (2 * eps)
            d_im = (L.value(setter(z + 1j * e, w - 1j * et)) - L.value(setter(z - 1j * e, w + 1j * et))) / (2 * eps)
            u = _unit(cols, rows, j, i)
            t_re = _entry(d_re) * u
            t_im = _entry(d_im) * u
            re_total = t_re if re_total is None else re_total + t_re
            im_total = t_im if im_total is None else im_total + t_im
    return re_total, im_total


def numeric_real_slots(L: ProtoLagrangian, sp: SlotPoint, eps: float = SLOT_STEP) -> Slots:
    """Derivatives along psi_Re and psi_Im directions, all c x r.

    The result reuses `Slots`: `o`/`mu` hold the real-part derivatives,
    `o_star`/`mu_star` the imaginary-part ones. A real step in psi moves
    psi^dagger by the transposed step, an imaginary step by minus it.
    """
    r, c = L.r, L.c
    x, y = _real_pair(L, sp.p, sp.qt, lambda a, b: sp.replace(p=a, qt=b), r, c, eps)
    xs, ys = [], []
    for m in range(L.n_dims):
        xm, ym = _real_pair(
            L, sp.r[m], sp.st[m], lambda a, b, m=m: sp.with_r(m, a).with_st(m, b), r, c, eps
        )
        xs.append(xm)
        ys.append(ym)
    return Slots(x, y, tuple(xs), tuple(ys))


# Euler-Lagrange residuals


def require_backend(L: ProtoLagrangian, backend: DerivativeBackend) -> None:
    if backend not in ("fd", "exact"):
        raise ValidationError(f"unknown derivative backend '{backend}'")
    if backend == "exact" and not L.jet_capable:
        raise ValidationError(f"{L.name} has no exact derivative backend; use 'fd'")


def slot_flux(
    sampler: Callable[[np.ndarray, bool], Slots],
    points: npt.ArrayLike,
    n_dims: int,
    backend: DerivativeBackend = "fd",
    step: float = OUTER_STEP,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(o, o_star, sum_mu d_mu mu, sum_mu d_mu mu_star) at `points`.

    `sampler(x, jets)` returns the slots at x. The outer derivative is either
    exact (jets) or a central difference with `step`.
    """
    x = as_points(points, n_dims)
    b = len(x)
    if backend == "exact":
        s = sampler(x, True)
        div = sum(as_batch(as_jet(s.mu[mu]).partial(mu).value, b) for mu in range(n_dims))
        div_star = sum(as_batch(as_jet(s.mu_star[mu]).partial(mu).value, b) for mu in range(n_dims))
        return as_batch(s.o, b), as_batch(s.o_star, b), div, div_star
    s = sampler(x, False)
    div = div_star = 0.0
    for mu in range(n_dims):
        dx = np.zeros(n_dims)
        dx[mu] = step
        plus = sampler(x + dx, False)
        minus = sampler(x - dx, False)
        div = div + (as_batch(plus.mu[mu], b) - as_batch(minus.mu[mu], b)) / (2 * step)
        div_star = div_star + (as_batch(plus.mu_star[mu], b) - as_batch(minus.mu_star[mu], b)) / (2 * step)
    return as_batch(s.o, b), as_batch(s.o_star, b), np.asarray(div), np.asarray(div_star)


def el_residual_holomorphic(
    L: ProtoLagrangian,
    psi: Field,
    points: npt.ArrayLike,
    backend: DerivativeBackend = "fd",
    step: float = OUTER_STEP,
) -> tuple[np.ndarray, np.ndarray]:
    """(D_psi, D_psi^dagger): L^(o) - sum d_mu L^(mu) and L^(o*) - sum d_mu L^(mu*)."""
    L.check_field(psi)
    require_backend(L, backend)

    def sampler(x: np.ndarray, jets: bool) -> Slots:
        return L.slots(SlotPoint.from_field(psi, x, jets=jets))

    o, o_star, div, div_star = slot_flux(sampler, points, L.n_dims, backend, step)
    return o - div, o_star - div_star


def el_residual_real(
    L: ProtoLagrangian,
    psi: Field,
    points: npt.ArrayLike,
    backend: DerivativeBackend = "fd",
    step: float = OUTER_STEP,
) -> tuple[np.ndarray, np.ndarray]:
    """(D_psi_Re, D_psi_Im), each c x r, from real-direction derivatives of the value only."""
    L.check_field(psi)
    require_backend(L, backend)

    def sampler(x: np.ndarray, jets: bool) -> Slots:
        return numeric_real_slots(L, SlotPoint.from_field(psi, x, jets=jets))

    o_re, o_im, div_re, div_im = slot_flux(sampler, points, L.n_dims, backend, step)
    return o_re - div_re, o_im - div_im


def _t(m: np.ndarray) -> np.ndarray:
    return np.swapaxes(m, -1, -2)


@dataclass(frozen=True)
class EquivalenceReport:
    real_relation: float
    imag_relation: float
    dagger_relation: float
    norms: dict[str, float]

    @property
    def worst(self) -> float:
        return max(self.real_relation, self.imag_relation)


def el_equivalence(
    L: ProtoLagrangian,
    psi: Field,
    points: npt.ArrayLike,
    backend: DerivativeBackend = "exact",
    step: float = OUTER_STEP,
) -> EquivalenceReport:
    """Compare the holomorphic and real-part residual systems.

    D_Re = D_psi + [D_psi^dagger]^T and D_Im = i D_psi - i [D_psi^dagger]^T hold
    for every field; (D_psi^dagger)^dagger = D_psi needs a real functional.
    """
    d, dd = el_residual_holomorphic(L, psi, points, backend, step)
    d_re, d_im = el_residual_real(L, psi, points, backend, step)
    return EquivalenceReport(
        real_relation=max_frobenius(d_re - (d + _t(dd))),
        imag_relation=max_frobenius(d_im - (1j * d - 1j * _t(dd))),
        dagger_relation=max_frobenius(dagger(dd) - d),
        norms={
            "holomorphic": max_frobenius(d),
            "conjugate": max_frobenius(dd),
            "real": max_frobenius(d_re),
            "imag": max_frobenius(d_im),
        },
    )


def conjugate_slot_relation_defect(
    L: ProtoLagrangian,
    psi: Field,
    points: npt.ArrayLike,
    backend: DerivativeBackend = "exact",
    step: float = OUTER_STEP,
) -> float:
    """Slot relation L^(mu*) = [L^(mu)]^dagger (pointwise-real densities only) and
    the residual relation [D_psi^dagger]^dagger = D_psi (always)."""
    L.check_field(psi)
    sp = SlotPoint.from_field(psi, points)
    defect = 0.0
    if L.realness == "pointwise":
        s = L.slots(sp).batched(sp.batch)
        defect = max_frobenius(s.o_star - dagger(s.o))
        for a, b in zip(s.mu, s.mu_star):
            defect = max(defect, max_frobenius(b - dagger(a)))
    d, dd = el_residual_holomorphic(L, psi, points, backend if L.jet_capable else "fd", step)
    return max(defect, max_frobenius(dagger(dd) - d))


# realness


@dataclass(frozen=True)
class RealnessReport:
    mode: RealnessMode
    # |integral of Im L_psi over the torus|
    integral: float
    # max |Im L_psi| (pointwise mode) or max |L - conj L - div w| (divergence mode)
    pointwise: float | None = None
    pointwise_fine: float | None = None
    order: float | None = None


def _density_values(L: ProtoLagrangian, psi: Field, points: np.ndarray) -> tuple[SlotPoint, np.ndarray]:
    sp = SlotPoint.from_field(psi, points)
    return sp, np.asarray(L.value(sp))


def realness_defect(L: ProtoLagrangian, psi: Field, grid: Grid) -> RealnessReport:
    L.check_field(psi)
    if grid.n_dims != L.n_dims:
        raise DimensionError(f"grid has N={grid.n_dims}, Lagrangian has N={L.n_dims}")
    volume = float(np.prod(grid.period))
    _, lv = _density_values(L, psi, grid.points())
    integral = abs(float(np.mean(np.imag(lv)))) * volume

    if L.realness == "pointwise":
        return RealnessReport("pointwise", integral, float(np.max(np.abs(np.imag(lv)))))
    if L.realness == "integral" or L.slack_fn is None:
        return RealnessReport("integral", integral)

    def slack_defect(g: Grid) -> float:
        sp, vals = _density_values(L, psi, g.points())
        w = np.asarray(L.slack_fn(sp))
        return float(np.max(np.abs(vals - np.conj(vals) - grid_divergence(w, g))))

    coarse = slack_defect(grid)
    fine = slack_defect(grid.refine())
    return RealnessReport("divergence", integral, coarse, fine, observed_order(coarse, fine))


# linearization and the finite-dimensional toy


def linearization_order(
    L: ProtoLagrangian,
    sp: SlotPoint,
    seed: int | np.random.Generator | None = 0,
    eps: tuple[float, float] = (1e-2, 5e-3),
) -> float:
    """Observed order of |L(Z + eH) - L(Z) - e Tr[slot H]| in e; 2 for a correct slot set."""
    rng = as_rng(seed)
    b = sp.batch
    hp = random_cmatrix(rng, L.r, L.c)
    hq = random_cmatrix(rng, L.c, L.r)
    hr = [random_cmatrix(rng, L.r, L.c) for _ in range(L.n_dims)]
    hs = [random_cmatrix(rng, L.c, L.r) for _ in range(L.n_dims)]
    s = L.slots(sp).batched(b)
    base = np.asarray(L.value(sp))
    first = mtr(s.o @ hp) + mtr(s.o_star @ hq)
    for m in range(L.n_dims):
        first = first + mtr(s.mu[m] @ hr[m]) + mtr(s.mu_star[m] @ hs[m])

    def err(e: float) -> float:
        moved = sp.replace(
            p=sp.p + e * hp,
            qt=sp.qt + e * hq,
            r=tuple(v + e * h for v, h in zip(sp.r, hr)),
            st=tuple(v + e * h for v, h in zip(sp.st, hs)),
        )
        return float(np.max(np.abs(np.asarray(L.value(moved)) - base - e * first)))

    return observed_order(err(eps[0]), err(eps[1]), ratio=eps[0] / eps[1])


def wirtinger_toy_defect(seed: int | np.random.Generator | None = 0, n: int = 3, eps: float = 1e-5) -> float:
    """Conversion formulas between (d/dz, d/dw) of an analytic f(z, w) with
    f(z, conj z) real and the real partials of g(x, y) = f(x + iy, x - iy)."""
    rng = as_rng(seed)
    h = random_cmatrix(rng, n, n)
    h = h + dagger(h)

    def f(z: np.ndarray, w: np.ndarray) -> complex:
        s = np.sum(z * w)
        return complex(w @ h.T @ z + s * s + z[0] * z[1] + w[0] * w[1])

    x = rng.standard_normal(n)
    y = rng.standard_normal(n)
    z = x + 1j * y
    w = x - 1j * y
    defect = abs(f(z, w).imag)
    for k in range(n):
        e = np.zeros(n)
        e[k] = eps
        fz = (f(z + e, w) - f(z - e, w)) / (2 * eps)
        fw = (f(z, w + e) - f(z, w - e)) / (2 * eps)
        gx = (f(z + e, w + e) - f(z - e, w - e)) / (2 * eps)
        gy = (f(z + 1j * e, w - 1j * e) - f(z - 1j * e, w + 1j * e)) / (2 * eps)
        defect = max(
            defect,
            abs(gx - (fz + fw)),
            abs(gy - (1j * fz - 1j * fw)),
            abs(fz - 0.5 * (gx - 1j * gy)),
            abs(fw - 0.5 * (gx + 1j * gy)),
            abs(fw - np.conj(fz)),
        )
    return float(defect)


def real_slot_conversion_defect(L: ProtoLagrangian, sp: SlotPoint) -> float:
    """d/dX = L^(1) + [L^(2)]^T, d/dY = i(L^(1) - [L^(2)]^T) and the inverse formulas, per slot pair."""
    b = sp.batch
    s = L.slots(sp).batched(b)
    real = numeric_real_slots(L, sp).batched(b)
    pairs = [(s.o, s.o_star, real.o, real.o_star)]
    pairs += list(zip(s.mu, s.mu_star, real.mu, real.mu_star))
    defect = 0.0
    for f1, f2, gx, gy in pairs:
        defect = max(
            defect,
            max_frobenius(gx - (f1 + _t(f2))),
            max_frobenius(gy - 1j * (f1 - _t(f2))),
            max_frobenius(f1 - 0.5 * (gx - 1j * gy)),
            max_frobenius(_t(f2) - 0.5 * (gx + 1j * gy)),
        )
    return defect


def gauged_density_blocks(L: ProtoLagrangian, seed: int | np.random.Generator | None = 0, samples: int = 20) -> dict[str, float]:
    """The three trace identities behind the realness of the gauged matter density.

    kinetic:  Tr{P^+ KG R J^-1 + J^-1 R^+ (KG)^+ P} = Tr{J^-1 (R^+ KG P + P^+ KG R)}
    gauge:    Tr{P^+ KG P A J^-1 + J^-1 A^+ P^+ (KG)^+ P} = 0
    mass:     Tr{P^+ K M P J^-1 + J^-1 P^+ M^+ K^+ P} = 0
    """
    if L.name not in ("dirac", "gauged_dirac"):
        raise ValidationError(f"density blocks are defined for the Dirac family, not '{L.name}'")
    rng = as_rng(seed)
    k, m, ji = L.params["K"], L.params["mass"], np.linalg.inv(L.params["J"])
    gammas, gauge = L.params["gammas"], L.params["A"]
    out = {"kinetic": 0.0, "gauge": 0.0, "mass": 0.0}
    for _ in range(samples):
        p = random_cmatrix(rng, L.r, L.c)
        pd_ = dagger(p)
        mass = np.trace(pd_ @ k @ m @ p @ ji + ji @ pd_ @ dagger(m) @ dagger(k) @ p)
        out["mass"] = max(out["mass"], abs(mass))
        for g, a in zip(gammas, gauge):
            r = random_cmatrix(rng, L.r, L.c)
            kg = k @ g
            lhs = np.trace(pd_ @ kg @ r @ ji + ji @ dagger(r) @ dagger(kg) @ p)
            rhs = np.trace(ji @ (dagger(r) @ kg @ p + pd_ @ kg @ r))
            out["kinetic"] = max(out["kinetic"], abs(lhs - rhs))
            gauge_term = np.trace(pd_ @ kg @ p @ a @ ji + ji @ dagger(a) @ pd_ @ dagger(kg) @ p)
            out["gauge"] = max(out["gauge"], abs(gauge_term))
    return {key: float(v) for key, v in out.items()}


# builtins


PAULI = (
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.eye(2, dtype=np.complex128),
)


def standard_gammas(n_dims: int, r: int = 2, seed: int = 0) -> list[np.ndarray]:
    """Hermitian coefficient matrices: Pauli-type for r = 2, seeded random otherwise."""
    if r == 2 and n_dims <= len(PAULI):
        return [PAULI[mu].copy() for mu in range(n_dims)]
    rng = as_rng(seed)
    out = []
    for _ in range(n_dims):
        g = random_cmatrix(rng, r, r)
        out.append(0.5 * (g + dagger(g)))
    return out


def _mat(params: dict[str, Any], key: str, default: Any = None) -> np.ndarray:
    v = params.get(key, default)
    if v is None:
        raise ValidationError(f"missing parameter '{key}'")
    if isinstance(v, np.ndarray):
        return v.astype(np.complex128)
    return matrix_from_json(v)


def _mats(params: dict[str, Any], key: str, default: Any = None) -> list[np.ndarray]:
    v = params.get(key, default)
    if v is None:
        raise ValidationError(f"missing parameter '{key}'")
    return [m.astype(np.complex128) if isinstance(m, np.ndarray) else matrix_from_json(m) for m in v]


def _condition(kind: str, name: str, defect: float, tol: float = 1e-10) -> None:
    if defect > tol:
        raise ValidationError(f"{kind}: condition '{name}' violated (defect {defect:.3e})")


def _herm_defect(m: np.ndarray) -> float:
    return max_frobenius(m - dagger(m))


def _dirac_family(kind: str, params: dict[str, Any], validate: bool) -> ProtoLagrangian:
    gammas = _mats(params, "gammas", standard_gammas(int(params.get("n_dims", 2)), int(params.get("r", 2))))
    n, r = len(gammas), gammas[0].shape[0]
    mass = _mat(params, "mass", 1j * np.eye(r))
    if kind == "dirac":
        c = int(params.get("c", 1))
        k = np.eye(r, dtype=np.complex128)
        j = np.eye(c, dtype=np.complex128)
        gauge = [np.zeros((c, c), dtype=np.complex128)] * n
    else:
        k = _mat(params, "K", np.eye(r))
        j = _mat(params, "J", np.eye(int(params.get("c", 1))))
        c = j.shape[0]
        gauge = _mats(params, "A", [np.zeros((c, c))] * n)
    nonlinear = float(params.get("nonlinear", 0.0))
    if len(gauge) != n:
        raise DimensionError(f"{kind}: need {n} gauge matrices, got {len(gauge)}")

    if validate:
        if kind == "dirac":
            for g in gammas:
                _condition(kind, "gamma_hermitian", _herm_defect(g))
            _condition(kind, "mass_antihermitian", max_frobenius(mass + dagger(mass)))
        else:
            _condition(kind, "k_invertible", 0.0 if np.linalg.cond(k) < 1e12 else np.inf)
            _condition(kind, "j_hermitian", _herm_defect(j))
            _condition(kind, "j_invertible", 0.0 if np.linalg.cond(j) < 1e12 else np.inf)
            for g in gammas:
                _condition(kind, "k_gamma_hermitian", _herm_defect(k @ g))
            _condition(kind, "mass_condition", max_frobenius(k @ mass + dagger(mass) @ dagger(k)))
            for a in gauge:
                _condition(kind, "gauge_in_algebra", max_frobenius(dagger(a) @ j + j @ a))

    ji = np.linalg.inv(j)
    kg = [k @ g for g in gammas]
    km = k @ mass

    def value(sp: SlotPoint) -> Any:
        out = 1j * mtr(sp.qt @ km @ sp.p @ ji)
        for mu in range(n):
            out = out + 1j * mtr(sp.qt @ kg[mu] @ sp.r[mu] @ ji) + 1j * mtr(sp.qt @ kg[mu] @ sp.p @ gauge[mu] @ ji)
        if nonlinear:
            out = out - nonlinear * mtr(sp.qt @ sp.p @ sp.qt @ sp.p)
        return out

    def slots(sp: SlotPoint) -> Slots:
        o = 1j * (ji @ sp.qt @ km)
        o_star = 1j * (km @ sp.p @ ji)
        for mu in range(n):
            o = o + 1j * (gauge[mu] @ ji @ sp.qt @ kg[mu])
            o_star = o_star + 1j * (kg[mu] @ sp.r[mu] @ ji) + 1j * (kg[mu] @ sp.p @ gauge[mu] @ ji)
        if nonlinear:
            o = o - 2 * nonlinear * (sp.qt @ sp.p @ sp.qt)
            o_star = o_star - 2 * nonlinear * (sp.p @ sp.qt @ sp.p)
        mu_slots = tuple(1j * (ji @ sp.qt @ kg[mu]) for mu in range(n))
        return Slots(o, o_star, mu_slots, tuple(zeros_like_slot(sp.p) for _ in range(n)))

    def slack(sp: SlotPoint) -> np.ndarray:
        return np.stack([1j * mtr(ji @ sp.qt @ kg[mu] @ sp.p) for mu in range(n)])

    return ProtoLagrangian(
        name=kind,
        r=r,
        c=c,
        n_dims=n,
        value_fn=value,
        slot_fn=slots,
        slack_fn=slack,
        realness="divergence",
        expected_equation="Gamma^mu (d_mu psi + psi A_mu) + M psi = 0",
        params={"gammas": gammas, "mass": mass, "K": k, "J": j, "A": gauge, "nonlinear": nonlinear},
    )


def _second_order(params: dict[str, Any], validate: bool) -> ProtoLagrangian:
    n = int(params.get("n_dims", 2))
    r = int(params.get("r", 2))
    c = int(params.get("c", 1))
    if "theta" in params:
        theta = [[_mat({"m": t}, "m") for t in row] for row in params["theta"]]
        n = len(theta)
        r = theta[0][0].shape[0]
    else:
        theta = [[np.eye(r, dtype=np.complex128) if mu == nu else np.zeros((r, r), dtype=np.complex128)
                  for nu in range(n)] for mu in range(n)]
    pot = _mat(params, "R", np.eye(r))
    if validate:
        for mu in range(n):
            for nu in range(n):
                _condition("second_order", "theta_pairing", max_frobenius(dagger(theta[mu][nu]) - theta[nu][mu]))
        _condition("second_order", "potential_hermitian", _herm_defect(pot))

    def value(sp: SlotPoint) -> Any:
        out = mtr(sp.qt @ pot @ sp.p)
        for mu in range(n):
            for nu in range(n):
                out = out + mtr(sp.st[mu] @ theta[mu][nu] @ sp.r[nu])
        return out

    def slots(sp: SlotPoint) -> Slots:
        mu_slots = []
        mu_star = []
        for nu in range(n):
            acc = sp.st[0] @ theta[0][nu]
            for mu in range(1, n):
                acc = acc + sp.st[mu] @ theta[mu][nu]
            mu_slots.append(acc)
        for mu in range(n):
            acc = theta[mu][0] @ sp.r[0]
            for nu in range(1, n):
                acc = acc + theta[mu][nu] @ sp.r[nu]
            mu_star.append(acc)
        return Slots(sp.qt @ pot, pot @ sp.p, tuple(mu_slots), tuple(mu_star))

    return ProtoLagrangian(
        name="second_order",
        r=r,
        c=c,
        n_dims=n,
        value_fn=value,
        slot_fn=slots,
        realness="pointwise",
        expected_equation="sum d_mu Theta^{mu nu} d_nu psi - R psi = 0",
        params={"theta": theta, "R": pot},
    )


def _schrodinger(params: dict[str, Any], validate: bool) -> ProtoLagrangian:
    """First-order-in-time form: Tr[psi^+ (i psi_t + V psi)] - sum_i Tr[d_i psi^+ d_i psi].

    Axis 0 is time. It differs from Tr[psi^+ (i psi_t + Lap psi + V psi)] by a divergence.
    """
    pot = _mat(params, "V", np.diag([1.0, 2.0]))
    n = int(params.get("n_space", 1)) + 1
    r = pot.shape[0]
    c = int(params.get("c", 1))
    if validate:
        _condition("schrodinger", "potential_hermitian", _herm_defect(pot))

    def value(sp: SlotPoint) -> Any:
        out = mtr(sp.qt @ (1j * sp.r[0] + pot @ sp.p))
        for i in range(1, n):
            out = out - mtr(sp.st[i] @ sp.r[i])
        return out

    def slots(sp: SlotPoint) -> Slots:
        mu_slots = (1j * sp.qt,) + tuple(-sp.st[i] for i in range(1, n))
        mu_star = (zeros_like_slot(sp.p),) + tuple(-sp.r[i] for i in range(1, n))
        return Slots(sp.qt @ pot, 1j * sp.r[0] + pot @ sp.p, mu_slots, mu_star)

    def slack(sp: SlotPoint) -> np.ndarray:
        w = np.zeros((n, sp.batch), dtype=np.complex128)
        w[0] = 1j * mtr(sp.qt @ sp.p)
        return w

    return ProtoLagrangian(
        name="schrodinger",
        r=r,
        c=c,
        n_dims=n,
        value_fn=value,
        slot_fn=slots,
        slack_fn=slack,
        realness="divergence",
        expected_equation="i psi_t + Lap psi + V psi = 0",
        params={"V": pot},
    )


def _quartic_probe(params: dict[str, Any], validate: bool) -> ProtoLagrangian:
    """Dirac density plus g Tr[psi^+ psi psi^+ psi D]; slots are numeric only."""
    base = _dirac_family("dirac", params, validate)
    d = _mat(params, "D", np.diag(np.arange(1, base.c + 1, dtype=float)))
    coupling = float(params.get("coupling", 1.0))
    if validate:
        _condition("quartic_probe", "d_hermitian", _herm_defect(d))

    def value(sp: SlotPoint) -> Any:
        return base.value_fn(sp) + coupling * mtr(sp.qt @ sp.p @ sp.qt @ sp.p @ d)

    return ProtoLagrangian(
        name="quartic_probe",
        r=base.r,
        c=base.c,
        n_dims=base.n_dims,
        value_fn=value,
        slack_fn=base.slack_fn,
        realness="divergence",
        params={**base.params, "D": d, "coupling": coupling},
    )


def _modulated(params: dict[str, Any], validate: bool) -> ProtoLagrangian:
    """Dirac density plus sin(x^axis) Tr[psi^+ psi]: explicitly x-dependent."""
    base = _dirac_family("dirac", params, validate)
    axis = int(params.get("axis", 0))
    if not 0 <= axis < base.n_dims:
        raise ValidationError(f"modulated: axis {axis} out of range")

    def weight(sp: SlotPoint) -> np.ndarray:
        return np.sin(sp.x[:, axis])

    def value(sp: SlotPoint) -> Any:
        return base.value_fn(sp) + weight(sp) * mtr(sp.qt @ sp.p)

    def slots(sp: SlotPoint) -> Slots:
        s = base.slot_fn(sp)
        w = weight(sp)[:, None, None]
        return Slots(s.o + w * sp.qt, s.o_star + w * sp.p, s.mu, s.mu_star)

    def grad_x(sp: SlotPoint) -> np.ndarray:
        out = np.zeros((sp.batch, base.n_dims), dtype=np.complex128)
        out[:, axis] = np.cos(sp.x[:, axis]) * mtr(sp.qt @ sp.p)
        return out

    return ProtoLagrangian(
        name="modulated",
        r=base.r,
        c=base.c,
        n_dims=base.n_dims,
        value_fn=value,
        slot_fn=slots,
        grad_x_fn=grad_x,
        slack_fn=base.slack_fn,
        realness="divergence",
        x_dependent=True,
        jet_capable=False,
        params={**base.params, "axis": axis},
    )


def _zero(params: dict[str, Any], validate: bool) -> ProtoLagrangian:
    n, r, c = int(params.get("n_dims", 2)), int(params.get("r", 2)), int(params.get("c", 1))

    def value(sp: SlotPoint) -> Any:
        return 0.0 * mtr(sp.qt @ sp.p)

    def slots(sp: SlotPoint) -> Slots:
        zq, zp = zeros_like_slot(sp.qt), zeros_like_slot(sp.p)
        return Slots(zq, zp, (zq,) * n, (zp,) * n)

    return ProtoLagrangian("zero", r, c, n, value, slots, realness="pointwise")


_BUILTINS: dict[str, Callable[[dict[str, Any], bool], ProtoLagrangian]] = {
    "dirac": lambda p, v: _dirac_family("dirac", p, v),
    "gauged_dirac": lambda p, v: _dirac_family("gauged_dirac", p, v),
    "second_order": _second_order,
    "schrodinger": _schrodinger,
    "quartic_probe": _quartic_probe,
    "modulated": _modulated,
    "zero": _zero,
}


def builtin(kind: str, params: dict[str, Any] | None = None, validate: bool = True) -> ProtoLagrangian:
    """Build a named proto-Lagrangian; structural conditions are checked unless `validate=False`."""
    if kind not in _BUILTINS:
        raise ValidationError(f"unknown Lagrangian '{kind}' (known: {', '.join(sorted(_BUILTINS))})")
    return _BUILTINS[kind](dict(params or {}), validate)


def builtin_kinds() -> list[str]:
    return sorted(_BUILTINS)
