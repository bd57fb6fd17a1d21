import dataclasses

import numpy as np
import pytest

from app.errors import DimensionError, PreconditionError, ValidationError
from app.fields import GaugeConfig, Grid, SmoothField, random_gauge_config, random_smooth_field, zero_gauge_config
from app.gauge_lagrangian import QuadraticCoeffs, quadratic_gauge_lagrangian
from app.lagrangian import PAULI, builtin
from app.lie import LieAlgebraSpec, sample_algebra
from app.matcore import MatrixShape
from app.noether import (
    FLUX_KINDS,
    FLUX_ROLES,
    LinearMap,
    SymmetryCandidate,
    conserved_current_violations,
    dilation_remainder,
    divergence_defect,
    external_symmetry_defect,
    flux_combined,
    flux_conserved_current,
    flux_dilation,
    flux_gauge_dilation,
    flux_gauge_internal,
    flux_gauge_translation,
    flux_internal,
    flux_translation,
    gauge_conjugation_defect,
    gauge_dilation_diagnostic,
    internal_symmetry_defect,
    offshell_identity_defect,
)
from app.oracles import dirac_plane_wave

NON_HERMITIAN = np.array([[1.0, 1.0], [0.0, 1.0]])
BOOST = np.diag([1.0, -1.0])
ROTATION = np.array([[0.0, 1.0], [-1.0, 0.0]])


def _dirac():
    return builtin("dirac", {"n_dims": 2, "r": 2, "c": 2})


def _psi(L, seed: int = 61):
    return random_smooth_field(seed, L.n_dims, MatrixShape(L.r, L.c), max_mode=1, amplitude=0.5)


def _phase(L) -> LinearMap:
    return LinearMap.right_mult(1j * np.eye(L.c), L.r)


def test_every_flux_kind_has_a_role():
    assert set(FLUX_ROLES) == set(FLUX_KINDS)


def test_linear_map_config():
    assert np.all(LinearMap.from_config(None, 2, 2).matrix() == 0)
    m = LinearMap.from_config({"left": [[1, 0], [0, -1]]}, 2, 1)
    assert np.allclose(m.apply(np.array([[1.0], [2.0]])), [[1.0], [-2.0]])
    with pytest.raises(ValidationError):
        LinearMap.from_config({"middle": [[1]]}, 1, 1)


def test_linear_map_factor_shapes():
    with pytest.raises(DimensionError):
        LinearMap(2, 2, left=np.eye(3))


def test_phase_flow():
    x = np.array([[1.0 + 1j, 2.0], [0.5, -1j]])
    moved = LinearMap.right_mult(1j * np.eye(2), 2).flow(0.3, x)
    assert np.allclose(moved, np.exp(0.3j) * x)


def test_phase_is_a_symmetry_of_dirac():
    L = _dirac()
    d = internal_symmetry_defect(L, SymmetryCandidate(_phase(L), 2), 62)
    assert d.worst < 1e-8
    assert d.agreement < 1e-7


def test_rotation_with_spin_is_a_symmetry_of_dirac():
    L = _dirac()
    cand = SymmetryCandidate(LinearMap.left_mult(-0.5j * PAULI[2], L.c), 2, a_ext=np.array([[0.0, 1.0], [-1.0, 0.0]]))
    assert internal_symmetry_defect(L, cand, 63).worst < 1e-8


def test_scaling_is_not_a_symmetry_of_dirac():
    L = _dirac()
    assert internal_symmetry_defect(L, SymmetryCandidate(LinearMap.identity(2, 2), 2), 64).worst > 1e-3


def test_conserved_current_conditions():
    gammas = [PAULI[0], PAULI[1]]
    mass = 1j * np.eye(2)
    assert conserved_current_violations(np.eye(2), gammas, mass) == []
    violations = conserved_current_violations(NON_HERMITIAN, gammas, mass)
    assert violations and all(v.startswith(("i:", "iii:")) for v in violations)


def test_conserved_current_refuses_non_hermitian_k():
    L = _dirac()
    a = zero_gauge_config(LieAlgebraSpec.unitary(2), 2)
    with pytest.raises(ValidationError):
        flux_conserved_current(_psi(L), NON_HERMITIAN, L.params["gammas"], L.params["mass"], a)


def test_internal_flux_refuses_scaling():
    L = _dirac()
    with pytest.raises(PreconditionError) as exc:
        flux_internal(L, _psi(L), LinearMap.identity(L.r, L.c))
    assert exc.value.defect > 1e-8


def test_dilation_needs_trace_free_generator():
    L = _dirac()
    cand = SymmetryCandidate(LinearMap.zero(2, 2), 2, a_ext=np.diag([1.0, 0.0]))
    with pytest.raises(ValidationError):
        flux_dilation(L, _psi(L), cand)


def test_conserved_current_offshell_identity_converges():
    L = _dirac()
    a = zero_gauge_config(LieAlgebraSpec.unitary(2), 2)
    flux = flux_conserved_current(_psi(L), np.eye(2), L.params["gammas"], L.params["mass"], a)
    rep = offshell_identity_defect(flux, Grid(2, 16), levels=3)
    assert rep.max_abs[0] > rep.max_abs[1] > rep.max_abs[2]
    assert rep.order > 1.8


def test_translation_offshell_identity_converges():
    L = _dirac()
    cand = SymmetryCandidate(LinearMap.zero(2, 2), 2, a_vec=np.array([1.0, 0.5]))
    flux = flux_translation(L, _psi(L, 65), cand)
    rep = offshell_identity_defect(flux, Grid(2, 16), levels=3)
    assert rep.order > 1.8


def test_plane_wave_current_is_conserved():
    L = _dirac()
    a = zero_gauge_config(LieAlgebraSpec.unitary(2), 2)
    psi = dirac_plane_wave(L.params["gammas"], L.params["mass"], [0.3], c=2)
    flux = flux_conserved_current(psi, np.eye(2), L.params["gammas"], L.params["mass"], a)
    rep = divergence_defect(dataclasses.replace(flux, periodic=False), Grid(2, 8), levels=1)
    assert rep.finest < 1e-10
    assert rep.order is None


def test_refinement_needs_a_level():
    L = _dirac()
    flux = flux_internal(L, _psi(L), _phase(L))
    with pytest.raises(ValidationError):
        divergence_defect(flux, Grid(2, 8), levels=0)


def test_conjugation_invariance_of_quadratic_gauge_density():
    alg = LieAlgebraSpec.unitary(2)
    G = quadratic_gauge_lagrangian(QuadraticCoeffs.identity(2), 2)
    b = sample_algebra(alg, np.random.default_rng(66))
    assert gauge_conjugation_defect(G, alg, b, 67) < 1e-8


def test_translation_is_external_symmetry_only_without_x_dependence():
    cand = SymmetryCandidate(LinearMap.zero(2, 2), 2, a_vec=np.array([1.0, 0.0]))
    assert external_symmetry_defect(_dirac(), cand, 68).worst < 1e-12
    modulated = builtin("modulated", {"n_dims": 2, "r": 2, "c": 2})
    assert external_symmetry_defect(modulated, cand, 69).worst > 1e-8


def test_gauge_internal_offshell_identity_converges():
    alg = LieAlgebraSpec.unitary(2)
    G = quadratic_gauge_lagrangian(QuadraticCoeffs.identity(2), 2)
    a = random_gauge_config(70, alg, 2, max_mode=1, amplitude=0.5)
    b = sample_algebra(alg, np.random.default_rng(71))
    flux = flux_gauge_internal(G, a, b)
    rep = offshell_identity_defect(flux, Grid(2, 16), levels=3)
    assert rep.order > 1.8


def _gauge_setup(seed: int = 72):
    alg = LieAlgebraSpec.unitary(2)
    G = quadratic_gauge_lagrangian(QuadraticCoeffs.identity(2), 2)
    return alg, G, random_gauge_config(seed, alg, 2, max_mode=1, amplitude=0.5)


def test_dilation_offshell_identity_converges():
    L = _dirac()
    cand = SymmetryCandidate(LinearMap.left_mult(-0.5j * PAULI[2], L.c), 2, a_ext=ROTATION)
    flux = flux_dilation(L, _psi(L, 73), cand)
    assert not flux.periodic
    rep = offshell_identity_defect(flux, Grid(2, 16), levels=3)
    assert rep.order > 1.8


def test_gauge_translation_offshell_identity_converges():
    _, G, a = _gauge_setup()
    flux = flux_gauge_translation(G, a, [1.0, 0.5])
    rep = offshell_identity_defect(flux, Grid(2, 24), levels=3)
    assert rep.max_abs[0] > rep.max_abs[2]
    assert rep.order > 1.8


def test_gauge_dilation_refuses_nonzero_remainder():
    _, G, a = _gauge_setup()
    assert np.max(np.abs(dilation_remainder(G, a, BOOST, np.random.default_rng(74).uniform(0, 2 * np.pi, (20, 2))))) > 1e-6
    with pytest.raises(PreconditionError) as exc:
        flux_gauge_dilation(G, a, BOOST)
    assert exc.value.defect > 1e-8


def test_gauge_dilation_accepts_vanishing_remainder():
    alg, G, _ = _gauge_setup()
    flux = flux_gauge_dilation(G, zero_gauge_config(alg, 2), BOOST)
    assert flux.preconditions["remainder"] == 0.0
    assert "remainder" not in flux.provenance


def test_gauge_dilation_needs_trace_free_generator():
    _, G, a = _gauge_setup()
    with pytest.raises(ValidationError):
        flux_gauge_dilation(G, a, np.eye(2))
    with pytest.raises(DimensionError):
        gauge_dilation_diagnostic(G, a, np.zeros((3, 3)))


def test_gauge_dilation_diagnostic_offshell_identity_converges():
    _, G, a = _gauge_setup()
    flux = gauge_dilation_diagnostic(G, a, BOOST)
    assert flux.preconditions["remainder"] > 1e-6
    rep = offshell_identity_defect(flux, Grid(2, 24), levels=3)
    assert rep.order > 1.8


def test_combined_offshell_identity_converges():
    L = _dirac()
    alg, G, a = _gauge_setup(75)
    b = sample_algebra(alg, np.random.default_rng(76))
    flux = flux_combined(L, G, _psi(L, 77), a, b)
    rep = offshell_identity_defect(flux, Grid(2, 24), levels=3)
    assert rep.order > 1.8


def test_conserved_current_checks_membership_away_from_origin():
    L = _dirac()
    # (e^{ix} - 1) I is in u(2) only where it vanishes
    leak = SmoothField.from_modes([[0, 0], [1, 0]], np.stack([-np.eye(2), np.eye(2)]))
    a = GaugeConfig(LieAlgebraSpec.unitary(2), (leak, leak))
    assert a.membership_defect(np.zeros((1, 2))) == 0.0
    with pytest.raises(ValidationError):
        flux_conserved_current(_psi(L), np.eye(2), L.params["gammas"], L.params["mass"], a)
    flux = flux_conserved_current(_psi(L), np.eye(2), L.params["gammas"], L.params["mass"], a, points_check=np.zeros((1, 2)))
    assert flux.preconditions["gauge_membership"] == 0.0
