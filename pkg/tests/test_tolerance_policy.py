import math

from app.contracts.models import Dims, GridSpec, SuiteConfig
from app.policy.tolerance_policy import TolerancePolicy


def _config(**kw) -> SuiteConfig:
    base = dict(
        suite="covariance",
        seed=42,
        dims=Dims(2, 2, 2),
        grid=GridSpec(16, 2 * math.pi),
        algebra={"kind": "unitary", "c": 2},
        lagrangian={"kind": "dirac"},
        tolerances={"membership": 1e-9},
    )
    base.update(kw)
    return SuiteConfig(**base)


def test_max_sense():
    tp = TolerancePolicy()
    assert tp.evaluate(1e-12, 1e-10) == []
    assert tp.evaluate(1e-8, 1e-10)


def test_min_sense_for_controls():
    tp = TolerancePolicy()
    assert tp.evaluate(0.5, 1e-3, sense="min") == []
    assert tp.evaluate(1e-6, 1e-3, sense="min")


def test_nan_never_passes():
    tp = TolerancePolicy()
    assert tp.evaluate(float("nan"), 1.0) == ["measured value is NaN"]
    assert tp.evaluate(float("nan"), 1.0, sense="min")


def test_order_below_minimum():
    tp = TolerancePolicy()
    assert tp.evaluate(1e-6, 1e-3, order=2.0, min_order=1.9) == []
    assert "below" in tp.evaluate(1e-6, 1e-3, order=1.2, min_order=1.9)[0]
    assert tp.evaluate(1e-6, 1e-3, order=None, min_order=1.9) == ["convergence order unavailable"]


def test_valid_config():
    assert TolerancePolicy().validate_config(_config()) == []


def test_invalid_config():
    tp = TolerancePolicy()
    assert tp.validate_config(_config(tolerances={"trace": 0.0}))
    assert tp.validate_config(_config(refinement_levels=1))
    assert tp.validate_config(_config(grid=GridSpec(2, 1.0)))
    assert tp.validate_config(_config(seed=-1))
