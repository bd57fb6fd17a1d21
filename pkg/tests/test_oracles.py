import numpy as np
import pytest

from app.errors import ValidationError
from app.fields import constant_gauge_config, first_order_residual, zero_gauge_config
from app.lagrangian import standard_gammas
from app.lie import LieAlgebraSpec
from app.matcore import max_frobenius
from app.oracles import dirac_plane_wave, schrodinger_solution, superposition, wave_period


def _points(n_dims: int, count: int = 8) -> np.ndarray:
    return np.random.default_rng(51).uniform(0, 2 * np.pi, size=(count, n_dims))


def test_dirac_plane_wave_solves_first_order_system():
    gammas = standard_gammas(2)
    mass = 1j * np.eye(2)
    psi = dirac_plane_wave(gammas, mass, [0.2], c=2)
    a = zero_gauge_config(LieAlgebraSpec.unitary(2), 2)
    assert max_frobenius(first_order_residual(psi, a, gammas, mass).values(_points(2))) < 1e-10


def test_dirac_dispersion():
    psi = dirac_plane_wave(standard_gammas(2), 1j * np.eye(2), [0.2])
    w0, k1 = psi.wavevectors[0]
    assert abs(w0 ** 2 + k1 ** 2 - 1.0) < 1e-10


def test_dirac_plane_wave_with_constant_gauge():
    gammas = standard_gammas(2)
    mass = 1j * np.eye(2)
    alg = LieAlgebraSpec.unitary(1)
    gauge = [np.array([[0.3j]]), np.array([[-0.1j]])]
    psi = dirac_plane_wave(gammas, mass, [0.5], gauge=gauge)
    a = constant_gauge_config(alg, gauge)
    assert max_frobenius(first_order_residual(psi, a, gammas, mass).values(_points(2))) < 1e-10


def test_superposition_of_solutions_is_a_solution():
    gammas = standard_gammas(2)
    mass = 1j * np.eye(2)
    waves = [dirac_plane_wave(gammas, mass, [k], c=2) for k in (0.2, -0.2)]
    psi = superposition(waves, [1.0, 0.5j])
    a = zero_gauge_config(LieAlgebraSpec.unitary(2), 2)
    assert max_frobenius(first_order_residual(psi, a, gammas, mass).values(_points(2))) < 1e-10


def test_branch_out_of_range():
    with pytest.raises(ValidationError):
        dirac_plane_wave(standard_gammas(2), 1j * np.eye(2), [0.2], branch=5)


def test_schrodinger_solution():
    pot = np.array([[1.0, 0.5], [0.5, -1.0]])
    psi = schrodinger_solution(pot, [1.0, 2.0], level=1, c=2, seed=52)
    x = _points(3)
    lap = sum(psi.partial(i).partial(i).values(x) for i in (1, 2))
    res = 1j * psi.partial(0).values(x) + lap + pot @ psi.values(x)
    assert max_frobenius(res) < 1e-10


def test_schrodinger_needs_hermitian_potential():
    with pytest.raises(ValidationError):
        schrodinger_solution([[0, 1], [0, 0]], [1.0])


def test_wave_period():
    assert wave_period(np.array([0.0, 2.0]))[1] == pytest.approx(np.pi)
