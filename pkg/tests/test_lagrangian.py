import numpy as np
import pytest

from app.errors import DimensionError, ValidationError
from app.fields import Grid, random_smooth_field
from app.lagrangian import (
    SlotPoint,
    builtin,
    builtin_kinds,
    conjugate_slot_relation_defect,
    density,
    el_equivalence,
    el_residual_holomorphic,
    el_residual_real,
    gauged_density_blocks,
    linearization_order,
    numeric_slots,
    realness_defect,
    wirtinger_toy_defect,
)
from app.matcore import MatrixShape, max_frobenius


def _points(n_dims: int, count: int = 8) -> np.ndarray:
    return np.random.default_rng(11).uniform(0, 2 * np.pi, size=(count, n_dims))


def _field(L, seed: int = 12):
    return random_smooth_field(seed, L.n_dims, MatrixShape(L.r, L.c), max_mode=1, amplitude=0.5)


def test_builtin_kinds_listed():
    assert {"dirac", "gauged_dirac", "second_order", "schrodinger"} <= set(builtin_kinds())


def test_unknown_builtin():
    with pytest.raises(ValidationError):
        builtin("klein_gordon")


def test_dirac_rejects_non_hermitian_gamma():
    with pytest.raises(ValidationError):
        builtin("dirac", {"gammas": [[[1, 1], [0, 1]], [[0, 1], [1, 0]]]})


def test_dirac_rejects_hermitian_mass():
    with pytest.raises(ValidationError):
        builtin("dirac", {"n_dims": 2, "mass": [[1, 0], [0, 1]]})


def test_field_shape_is_checked():
    L = builtin("dirac", {"n_dims": 2, "r": 2, "c": 1})
    psi = random_smooth_field(1, 2, MatrixShape(2, 2))
    with pytest.raises(DimensionError):
        L.check_field(psi)


def test_analytic_slots_match_numeric():
    L = builtin("second_order", {"n_dims": 2, "r": 2, "c": 2})
    sp = SlotPoint.random(3, L.r, L.c, L.n_dims, 5, scale=0.5)
    assert L.slots(sp).distance(numeric_slots(L, sp), sp.batch) < 1e-7


def test_slot_linearization_is_second_order():
    L = builtin("dirac", {"n_dims": 2, "r": 2, "c": 2, "nonlinear": 1.0})
    sp = SlotPoint.random(4, L.r, L.c, L.n_dims, 5, scale=0.5)
    assert linearization_order(L, sp, 5) > 1.8


def test_el_systems_agree_for_dirac():
    L = builtin("dirac", {"n_dims": 2, "r": 2, "c": 2})
    rep = el_equivalence(L, _field(L), _points(2))
    assert rep.worst < 1e-8
    assert rep.dagger_relation < 1e-8


def test_exact_and_fd_residuals_agree():
    L = builtin("second_order", {"n_dims": 2, "r": 2, "c": 1})
    psi = _field(L)
    x = _points(2)
    d_exact, _ = el_residual_holomorphic(L, psi, x, "exact")
    d_fd, _ = el_residual_holomorphic(L, psi, x, "fd")
    assert max_frobenius(d_exact - d_fd) < 1e-5


def test_second_order_density_is_real_pointwise():
    L = builtin("second_order", {"n_dims": 2, "r": 2, "c": 1})
    rep = realness_defect(L, _field(L), Grid(2, 16))
    assert rep.mode == "pointwise"
    assert rep.pointwise < 1e-12


def test_dirac_density_is_real_up_to_divergence():
    L = builtin("dirac", {"n_dims": 2, "r": 2, "c": 1})
    rep = realness_defect(L, _field(L), Grid(2, 16))
    assert rep.integral < 1e-9
    if rep.mode == "divergence":
        assert rep.order > 1.8


def test_gauged_density_blocks_vanish():
    L = builtin("gauged_dirac", {"n_dims": 2, "r": 2, "J": [[1, 0], [0, -1]]})
    assert max(gauged_density_blocks(L, 13).values()) < 1e-12


def test_density_blocks_need_dirac_family():
    with pytest.raises(ValidationError):
        gauged_density_blocks(builtin("second_order"))


def test_wirtinger_toy():
    assert wirtinger_toy_defect(14) < 1e-6


def test_conjugate_slot_relation():
    L = builtin("second_order", {"n_dims": 2, "r": 2, "c": 2})
    assert conjugate_slot_relation_defect(L, _field(L), _points(2)) < 1e-8


def test_real_residual_shapes():
    L = builtin("second_order", {"n_dims": 2, "r": 2, "c": 1})
    re_part, im_part = el_residual_real(L, _field(L), _points(2, 3))
    assert np.shape(re_part)[-2:] == (1, 2)
    assert np.shape(im_part)[-2:] == (1, 2)


def test_density_is_evaluated_per_point():
    L = builtin("dirac", {"n_dims": 2, "r": 2, "c": 2})
    ev = density(L, _field(L), _points(2, 5))
    assert np.shape(ev.value) == (5,)
