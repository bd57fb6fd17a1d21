import numpy as np
import pytest

from app.errors import DimensionError, ValidationError
from app.fields import (
    Grid,
    SmoothField,
    cayley_field,
    check_covariance,
    covariant_ad,
    covariant_right,
    export_samples_csv,
    field_strength,
    gauge_transform_gauge,
    gauge_transform_matter,
    grid_divergence,
    observed_order,
    random_gauge_config,
    random_group_field,
    random_smooth_field,
    stencil_divergence,
    zero_gauge_config,
)
from app.lie import LieAlgebraSpec, LieGroupSpec, group_defect
from app.matcore import MatrixShape, max_frobenius


def _wave() -> SmoothField:
    # e^{i x0} as a 1x1 field on two axes
    return SmoothField.from_modes([[1, 0]], np.ones((1, 1, 1)))


def test_smooth_field_partials_are_exact():
    f = _wave()
    x = np.array([[0.3, 1.1], [2.0, -0.4]])
    assert np.allclose(f.partial(0).values(x)[:, 0, 0], 1j * np.exp(1j * x[:, 0]))
    assert np.allclose(f.partial(1).values(x), 0.0)
    assert np.allclose(f.partial(0).partial(0).values(x)[:, 0, 0], -np.exp(1j * x[:, 0]))


def test_field_dict_round_trip_preserves_values():
    f = random_smooth_field(3, 2, MatrixShape(2, 2))
    g = SmoothField.from_dict(f.to_dict())
    x = np.random.default_rng(0).uniform(0, 6, size=(5, 2))
    assert max_frobenius(f.values(x) - g.values(x)) < 1e-12


def test_from_dict_rejects_malformed():
    with pytest.raises(ValidationError):
        SmoothField.from_dict({"modes": []})


def test_algebra_valued_random_field():
    alg = LieAlgebraSpec.by_j(np.diag([1.0, -1.0]))
    a = random_gauge_config(4, alg, 3)
    x = np.random.default_rng(1).uniform(0, 6, size=(10, 3))
    assert a.membership_defect(x) < 1e-12


def test_cayley_field_lies_in_group():
    alg = LieAlgebraSpec.by_j(np.diag([1.0, -1.0]))
    u = random_group_field(5, alg, 2, amplitude=0.5)
    x = np.random.default_rng(2).uniform(0, 6, size=(10, 2))
    assert group_defect(LieGroupSpec(alg), u.values(x)) < 1e-12


def test_cayley_of_zero_is_identity():
    u = cayley_field(SmoothField.zero(2, MatrixShape(2, 2)))
    assert max_frobenius(u.values(np.zeros((1, 2))) - np.eye(2)) < 1e-15


def test_field_strength_covariance():
    alg = LieAlgebraSpec.unitary(2)
    a = random_gauge_config(6, alg, 3, amplitude=0.5)
    u = random_group_field(7, alg, 3, amplitude=0.5)
    x = np.random.default_rng(3).uniform(0, 6, size=(20, 3))
    assert check_covariance(a, u, x) < 1e-10
    assert abs(check_covariance(a, u, x, workers=3) - check_covariance(a, u, x)) < 1e-15


def test_zero_gauge_has_zero_strength():
    f = field_strength(zero_gauge_config(LieAlgebraSpec.unitary(2), 3))
    x = np.zeros((2, 3))
    assert all(max_frobenius(f.get(mu, nu).values(x)) == 0.0 for mu, nu in f.pairs)


def test_gauge_transform_shape_check():
    a = zero_gauge_config(LieAlgebraSpec.unitary(2), 2)
    u = random_group_field(1, LieAlgebraSpec.unitary(3), 2)
    with pytest.raises(DimensionError):
        gauge_transform_gauge(a, u)


def test_grid_divergence_second_order():
    errors = []
    for n in (16, 32):
        g = Grid(2, n)
        x = g.points()
        v = [np.sin(x[:, 0]), np.cos(x[:, 1])]
        exact = np.cos(x[:, 0]) - np.sin(x[:, 1])
        errors.append(float(np.max(np.abs(grid_divergence(v, g) - exact))))
    assert observed_order(*errors) > 1.9


def test_stencil_divergence_of_linear_flux():
    x = np.random.default_rng(4).uniform(0, 1, size=(6, 2))
    div = stencil_divergence(lambda p: np.stack([2 * p[:, 0], -p[:, 1]]), x, 0.1)
    assert np.allclose(div, 1.0)


def test_grid_rejects_tiny_grids():
    with pytest.raises(ValidationError):
        Grid(2, 2)


def test_observed_order_at_round_off():
    assert observed_order(1e-14, 1e-15) == float("inf")
    assert abs(observed_order(4e-4, 1e-4) - 2.0) < 1e-12


def test_export_samples_csv(tmp_path):
    g = Grid(1, 4)
    out = export_samples_csv(tmp_path / "s.csv", g.points(), np.arange(4) + 1j)
    lines = out.read_text().splitlines()
    assert lines[0] == "x0,value_re,value_im"
    assert len(lines) == 5


def test_covariant_derivative_transforms_on_the_right():
    alg = LieAlgebraSpec.unitary(2)
    psi = random_smooth_field(81, 2, MatrixShape(3, 2), max_mode=1, amplitude=0.5)
    a = random_gauge_config(82, alg, 2, max_mode=1, amplitude=0.5)
    u = random_group_field(83, alg, 2, max_mode=1, amplitude=0.5)
    x = np.random.default_rng(84).uniform(0, 2 * np.pi, size=(6, 2))
    moved = gauge_transform_matter(psi, u)
    a_moved = gauge_transform_gauge(a, u)
    for mu in range(2):
        lhs = covariant_right(moved, a_moved, mu).values(x)
        rhs = (covariant_right(psi, a, mu) @ u).values(x)
        assert max_frobenius(lhs - rhs) < 1e-10


def test_covariant_ad_without_gauge_is_the_partial():
    u = random_group_field(85, LieAlgebraSpec.unitary(2), 2, max_mode=1)
    x = np.random.default_rng(86).uniform(0, 2 * np.pi, size=(4, 2))
    a = zero_gauge_config(LieAlgebraSpec.unitary(2), 2)
    assert max_frobenius(covariant_ad(u, a, 1).values(x) - u.partial(1).values(x)) < 1e-14


def test_matter_transform_needs_matching_columns():
    psi = random_smooth_field(87, 2, MatrixShape(2, 3))
    u = random_group_field(88, LieAlgebraSpec.unitary(2), 2)
    with pytest.raises(DimensionError):
        gauge_transform_matter(psi, u)
