import numpy as np
import pytest

from app.errors import SingularMatrixError, ValidationError
from app.lie import (
    LieAlgebraSpec,
    LieGroupSpec,
    algebra_from_config,
    complex_structure_defect,
    dagger_stable,
    is_in_algebra,
    is_involutive_j,
    membership_defect,
    ortho_project,
    q_j,
    sample_algebra,
    sample_group,
)
from app.matcore import max_frobenius, random_cmatrix


def test_unitary_dimension():
    assert LieAlgebraSpec.unitary(2).dim == 4
    assert LieAlgebraSpec.special_unitary(2).dim == 3


def test_samples_are_members():
    for spec in (LieAlgebraSpec.unitary(3), LieAlgebraSpec.by_j(np.diag([1.0, -1.0])),
                 LieAlgebraSpec.special_unitary(2)):
        assert membership_defect(spec, sample_algebra(spec, 5)) < 1e-12


def test_projection_is_idempotent_and_lands_in_algebra():
    spec = LieAlgebraSpec.by_j(np.diag([1.0, -1.0]))
    z = random_cmatrix(np.random.default_rng(6), 2, 2)
    pz = ortho_project(spec, z)
    assert membership_defect(spec, pz) < 1e-12
    assert max_frobenius(ortho_project(spec, pz) - pz) < 1e-12


def test_qj_equals_projection_for_involutive_j():
    j = np.diag([1.0, -1.0])
    z = random_cmatrix(np.random.default_rng(7), 2, 2)
    assert is_involutive_j(j)
    assert max_frobenius(q_j(j, z) - ortho_project(LieAlgebraSpec.by_j(j), z)) < 1e-12


def test_qj_singular_j():
    with pytest.raises(SingularMatrixError):
        q_j(np.zeros((2, 2)), np.eye(2))


def test_group_samples_preserve_j():
    group = LieGroupSpec(LieAlgebraSpec.by_j(np.diag([1.0, -1.0])))
    assert group.contains(sample_group(group, 8, 0.7))


def test_dagger_stability():
    assert dagger_stable(LieAlgebraSpec.unitary(2))
    assert not dagger_stable(LieAlgebraSpec.by_j(np.diag([2.0, -1.0])))


def test_complex_structure_holds_for_unitary_only():
    assert complex_structure_defect(LieAlgebraSpec.unitary(2)) < 1e-12
    assert complex_structure_defect(LieAlgebraSpec.special_unitary(2)) > 1e-3


def test_algebra_from_config():
    assert algebra_from_config({"kind": "unitary", "c": 3}).c == 3
    spec = algebra_from_config({"kind": "byJ", "J": [[1, 0], [0, -1]]})
    assert spec.kind == "byJ" and spec.dim == 4
    with pytest.raises(ValidationError):
        algebra_from_config({"kind": "orthogonal", "c": 2})
    with pytest.raises(ValidationError):
        algebra_from_config({"c": 2})


def test_is_in_algebra():
    u2 = LieAlgebraSpec.unitary(2)
    assert is_in_algebra(u2, 1j * np.eye(2))
    assert not is_in_algebra(u2, np.eye(2))
    assert is_in_algebra(LieAlgebraSpec.by_j(np.diag([1.0, -1.0])), np.array([[0, 1], [1, 0]]))
