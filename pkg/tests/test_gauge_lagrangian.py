import numpy as np
import pytest

from app.errors import PreconditionError, ValidationError
from app.fields import random_gauge_config, random_group_field, random_smooth_field, zero_gauge_config
from app.gauge_lagrangian import (
    QuadraticCoeffs,
    current_condition_defect,
    dynamic_el,
    gauge_builtin,
    gauge_el_residual,
    gauge_variant_agreement,
    global_invariance_defect,
    local_invariance_defect,
    quadratic_closed_form_residual,
    quadratic_gauge_lagrangian,
    static_extension,
    stacked_view_consistency,
)
from app.lagrangian import builtin, density
from app.lie import LieAlgebraSpec
from app.matcore import MatrixShape, max_frobenius

SPLIT = np.diag([1.0, -1.0])


def _points(n_dims: int = 3, count: int = 6) -> np.ndarray:
    return np.random.default_rng(21).uniform(0, 2 * np.pi, size=(count, n_dims))


def _quadratic(c: int = 2):
    return quadratic_gauge_lagrangian(QuadraticCoeffs.identity(3), c)


def test_coefficients_must_be_hermitian():
    with pytest.raises(ValidationError):
        QuadraticCoeffs(2, np.array([[1j]]))


def test_hat_is_antisymmetric_in_each_pair():
    h = QuadraticCoeffs.identity(3)
    assert h.hat(0, 1, 0, 1) == 1
    assert h.hat(1, 0, 0, 1) == -1
    assert h.hat(1, 0, 1, 0) == 1
    assert h.hat(1, 1, 0, 2) == 0


def test_minkowski_signs():
    mk = QuadraticCoeffs.minkowski()
    assert mk.coefficient((0, 2), (0, 2)) == -1
    assert mk.coefficient((2, 3), (2, 3)) == 1


def test_unknown_gauge_builtin():
    with pytest.raises(ValidationError):
        gauge_builtin("yang")


def test_variants_agree_on_unitary_algebra():
    a = random_gauge_config(22, LieAlgebraSpec.unitary(2), 3, max_mode=1, amplitude=0.5)
    agree = gauge_variant_agreement(_quadratic(), a, _points())
    assert agree["general_vs_dagger_stable"] < 1e-9
    assert agree["membership"] < 1e-9
    assert agree["qj_vs_dagger_stable"] < 1e-9


def test_qj_variant_on_split_algebra():
    a = random_gauge_config(23, LieAlgebraSpec.by_j(SPLIT), 3, max_mode=1, amplitude=0.5)
    agree = gauge_variant_agreement(_quadratic(), a, _points())
    assert agree["qj_vs_dagger_stable"] < 1e-9


def test_dagger_stable_variant_refuses_non_stable_algebra():
    a = random_gauge_config(24, LieAlgebraSpec.by_j(np.diag([2.0, -1.0])), 3, max_mode=1)
    with pytest.raises(ValidationError):
        gauge_el_residual(_quadratic(), a, _points(), "dagger_stable", "exact")


def test_quadratic_closed_form():
    h = QuadraticCoeffs.identity(3)
    a = random_gauge_config(25, LieAlgebraSpec.unitary(2), 3, max_mode=1, amplitude=0.5)
    x = _points()
    stable = gauge_el_residual(quadratic_gauge_lagrangian(h, 2), a, x, "dagger_stable", "exact")
    closed = quadratic_closed_form_residual(h, a, x)
    assert max(max_frobenius(s - f) for s, f in zip(stable, closed)) < 1e-9


def test_stacked_view_matches_gauge_residual():
    a = random_gauge_config(26, LieAlgebraSpec.unitary(2), 3, max_mode=1, amplitude=0.5)
    assert stacked_view_consistency(_quadratic(), a, _points(), "exact") < 1e-8


def test_dirac_is_locally_invariant():
    L = builtin("dirac", {"n_dims": 3, "r": 2, "c": 2})
    alg = LieAlgebraSpec.unitary(2)
    psi = random_smooth_field(27, 3, MatrixShape(2, 2), max_mode=1, amplitude=0.5)
    a = random_gauge_config(28, alg, 3, max_mode=1, amplitude=0.5)
    u = random_group_field(29, alg, 3, max_mode=1, amplitude=0.5)
    assert local_invariance_defect(L, psi, a, u, _points()) < 1e-10


def test_quartic_probe_is_refused():
    L = builtin("quartic_probe", {"n_dims": 3, "r": 2, "c": 2})
    alg = LieAlgebraSpec.unitary(2)
    assert global_invariance_defect(L, alg, 30)[0] > 1e-4
    psi = random_smooth_field(31, 3, MatrixShape(2, 2), max_mode=1)
    a = random_gauge_config(32, alg, 3, max_mode=1)
    u = random_group_field(33, alg, 3, max_mode=1)
    with pytest.raises(PreconditionError) as exc:
        local_invariance_defect(L, psi, a, u, _points())
    assert exc.value.defect > 1e-4


def test_current_condition():
    alg = LieAlgebraSpec.unitary(2)
    assert current_condition_defect(builtin("dirac", {"n_dims": 3, "r": 2, "c": 2}), alg) < 1e-9
    mismatched = builtin("gauged_dirac", {"n_dims": 3, "r": 2, "J": SPLIT})
    assert current_condition_defect(mismatched, alg) > 1e-3


def test_dynamic_extension_refuses_current_violation():
    alg = LieAlgebraSpec.unitary(2)
    L = builtin("gauged_dirac", {"n_dims": 3, "r": 2, "J": SPLIT})
    psi = random_smooth_field(34, 3, MatrixShape(2, 2), max_mode=1)
    a = random_gauge_config(35, alg, 3, max_mode=1)
    with pytest.raises(PreconditionError):
        dynamic_el(L, _quadratic(), psi, a, _points(), "exact")


def test_static_extension_without_gauge_is_the_matter_density():
    L = builtin("dirac", {"n_dims": 3, "r": 2, "c": 2})
    psi = random_smooth_field(36, 3, MatrixShape(2, 2), max_mode=1, amplitude=0.5)
    x = _points()
    extended = static_extension(L, psi, zero_gauge_config(LieAlgebraSpec.unitary(2), 3), x)
    assert np.max(np.abs(extended.value - density(L, psi, x).value)) < 1e-14
