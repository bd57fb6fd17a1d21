import numpy as np
import pytest

from app.errors import DimensionError, EvaluationError, ValidationError
from app.matcore import (
    IDENTITY_ARITY,
    as_cmatrix,
    commutator,
    dagger,
    mat_exp,
    matrix_from_json,
    max_frobenius,
    random_cmatrix,
    re_inner,
    trace_identity_defect,
)


def test_dagger_is_conjugate_transpose():
    m = np.array([[1 + 2j, 3], [4j, 5]])
    assert np.allclose(dagger(m), np.array([[1 - 2j, -4j], [3, 5]]))


def test_dagger_rejects_vectors():
    with pytest.raises(DimensionError):
        dagger(np.ones(3))


def test_commutator_antisymmetric():
    rng = np.random.default_rng(1)
    a, b = random_cmatrix(rng, 3, 3), random_cmatrix(rng, 3, 3)
    assert max_frobenius(commutator(a, b) + commutator(b, a)) < 1e-13


def test_commutator_shape_mismatch():
    with pytest.raises(DimensionError):
        commutator(np.eye(2), np.eye(3))


def test_re_inner_matches_trace_form():
    rng = np.random.default_rng(2)
    x, y = random_cmatrix(rng, 2, 3), random_cmatrix(rng, 2, 3)
    assert abs(re_inner(x, y) - np.real(np.trace(dagger(x) @ y))) < 1e-12


def test_mat_exp_of_anti_hermitian_is_unitary():
    rng = np.random.default_rng(3)
    z = random_cmatrix(rng, 3, 3)
    u = mat_exp(z - dagger(z))
    assert max_frobenius(dagger(u) @ u - np.eye(3)) < 1e-12


def test_as_cmatrix_rejects_non_finite():
    with pytest.raises(EvaluationError):
        as_cmatrix([[np.nan, 0.0], [0.0, 1.0]])


def test_trace_identities_on_random_samples():
    rng = np.random.default_rng(4)
    for kind, arity in IDENTITY_ARITY.items():
        for n in (2, 3, 4):
            mats = [random_cmatrix(rng, n, n, 0.5) for _ in range(arity)]
            assert trace_identity_defect(kind, mats) < 1e-12


def test_trace_identity_wrong_arity():
    with pytest.raises(ValidationError):
        trace_identity_defect("real_split", [np.eye(2)])


def test_matrix_from_json_forms():
    assert np.allclose(matrix_from_json([[1, 0], [0, -1]]), np.diag([1, -1]))
    assert np.allclose(matrix_from_json({"re": [[0, 1], [1, 0]], "im": [[1, 0], [0, 1]]}),
                       np.array([[1j, 1], [1, 1j]]))
    assert np.allclose(matrix_from_json([[[0, 1], [2, 0]], [[0, 0], [1, -1]]]),
                       np.array([[1j, 2], [0, 1 - 1j]]))
