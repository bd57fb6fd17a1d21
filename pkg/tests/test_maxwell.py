import numpy as np
import pytest

from app.errors import DimensionError, ValidationError
from app.fields import SmoothField
from app.gauge_lagrangian import gauge_el_residual, minkowski_lagrangian
from app.matcore import MatrixShape, max_frobenius
from app.maxwell import (
    as_potential_form,
    check_potentials,
    eb_fields,
    gauge_shift,
    gauss_defect,
    lorenz_defect,
    magnetic_divergence,
    maxwell_defect,
    maxwell_potential_residual,
    potentials_to_gauge,
    random_potentials,
    random_real_scalar,
)
from app.oracles import maxwell_plane_wave


def _points(count: int = 10) -> np.ndarray:
    return np.random.default_rng(41).uniform(0, 2 * np.pi, size=(count, 4))


def test_random_scalar_is_real():
    f = random_real_scalar(42)
    assert np.max(np.abs(np.imag(f.values(_points())))) < 1e-14


def test_minkowski_equations_are_potential_form():
    phi, avec = random_potentials(43, max_mode=1, amplitude=0.5)
    x = _points()
    residuals = gauge_el_residual(minkowski_lagrangian(1), potentials_to_gauge(phi, avec), x, "dagger_stable", "exact")
    gs, gv = as_potential_form(residuals)
    s, v = maxwell_potential_residual(phi, avec, x)
    assert np.max(np.abs(gs - s)) < 1e-10
    assert np.max(np.abs(gv - v)) < 1e-10


def test_plane_wave_is_a_solution():
    phi, avec = maxwell_plane_wave([0.0, 2.0, 1.0], [1.0, 0.0, 0.0])
    x = _points()
    s, v = maxwell_potential_residual(phi, avec, x)
    assert max(np.max(np.abs(s)), np.max(np.abs(v))) < 1e-10
    assert lorenz_defect(phi, avec, x) < 1e-10
    e, b = eb_fields(phi, avec)
    assert maxwell_defect(e, b, x) < 1e-10
    assert gauss_defect(e, x) < 1e-10


def test_plane_wave_needs_transverse_polarization():
    with pytest.raises(ValidationError):
        maxwell_plane_wave([1.0, 0.0, 0.0], [1.0, 1.0, 0.0])


def test_gauge_shift_keeps_e_and_b():
    phi, avec = random_potentials(44, max_mode=1)
    lam = random_real_scalar(45, max_mode=1)
    x = _points()
    e, b = eb_fields(phi, avec)
    e2, b2 = eb_fields(*gauge_shift(phi, avec, lam))
    for u, v in zip(e + b, e2 + b2):
        assert max_frobenius(u.values(x) - v.values(x)) < 1e-11
    assert magnetic_divergence(b, x) < 1e-12


def test_potentials_are_checked():
    phi = SmoothField.zero(3, MatrixShape(1, 1))
    with pytest.raises(DimensionError):
        check_potentials(phi, [phi, phi, phi])
