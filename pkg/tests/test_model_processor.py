import pytest

from models.spec_models import FluidSpec, SrbmSpec
from processors.model_processor import (
    check_stability,
    classify_walk,
    mean_drift,
    mmc_stationary,
    two_demand_parameters,
    two_demand_walk,
)
from utils.exceptions import UnstableModelError
from utils.validators import ModelValidator

from conftest import clamped_walk_dict, product_form_dict

SIMPLE_WALK = [[0.0, 0.25, 0.0], [0.25, 0.0, 0.25], [0.0, 0.25, 0.0]]


def test_mean_drift():
    interior = [[0.0, 0.3, 0.0], [0.4, 0.0, 0.1], [0.0, 0.2, 0.0]]
    drift = mean_drift(ModelValidator.validate_walk(clamped_walk_dict(interior)))
    assert drift.Mx == pytest.approx(-0.1)
    assert drift.My == pytest.approx(-0.3)
    assert drift.light_tailed


def test_zero_drift_walk():
    spec = ModelValidator.validate_walk(clamped_walk_dict(SIMPLE_WALK))
    drift = mean_drift(spec)
    assert drift.Mx == 0.0 and drift.My == 0.0
    assert not drift.light_tailed

    verdict = check_stability(spec)
    assert verdict.stable is None
    assert not verdict.verified
    assert classify_walk(spec).genus == 0


def test_drift_of_a_single_jump():
    interior = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]]
    drift = mean_drift(ModelValidator.validate_walk(clamped_walk_dict(interior)))
    assert (drift.Mx, drift.My) == (1.0, 1.0)


def test_drift_is_linear_in_the_kernel():
    left = [[0.0, 0.5, 0.0], [0.5, 0.0, 0.0], [0.0, 0.0, 0.0]]
    right = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.5], [0.0, 0.5, 0.0]]
    mixed = [[0.3 * a + 0.7 * b for a, b in zip(ra, rb)] for ra, rb in zip(left, right)]
    d_left = mean_drift(ModelValidator.validate_walk(clamped_walk_dict(left)))
    d_right = mean_drift(ModelValidator.validate_walk(clamped_walk_dict(right)))
    d_mixed = mean_drift(ModelValidator.validate_walk(clamped_walk_dict(mixed)))
    assert d_mixed.Mx == pytest.approx(0.3 * d_left.Mx + 0.7 * d_right.Mx)
    assert d_mixed.My == pytest.approx(0.3 * d_left.My + 0.7 * d_right.My)


def test_classify_two_demand_walk(case1_walk):
    cls = classify_walk(case1_walk)
    assert cls.nonsingular
    assert cls.genus == 1
    assert not cls.x_shaped
    assert cls.irreducible


def test_classify_x_shaped_walk():
    interior = [[0.25, 0.0, 0.25], [0.0, 0.0, 0.0], [0.25, 0.0, 0.25]]
    cls = classify_walk(ModelValidator.validate_walk(clamped_walk_dict(interior)))
    assert cls.x_shaped


def test_classify_walk_without_upward_jumps():
    interior = [[0.0, 0.3, 0.0], [0.5, 0.0, 0.0], [0.0, 0.2, 0.0]]
    cls = classify_walk(ModelValidator.validate_walk(clamped_walk_dict(interior)))
    assert not cls.nonsingular


def test_walk_stability_drift_test(case1_walk):
    verdict = check_stability(case1_walk)
    assert verdict.stable is True
    assert not verdict.verified
    assert verdict.details["horizontal_condition"] == pytest.approx(-0.05)
    assert verdict.details["vertical_condition"] == pytest.approx(-0.09)


def test_unstable_walk_can_be_asserted_stable():
    interior = [[0.0, 0.1, 0.0], [0.1, 0.0, 0.4], [0.0, 0.4, 0.0]]
    raw = clamped_walk_dict(interior)
    with pytest.raises(UnstableModelError):
        check_stability(ModelValidator.validate_walk(raw))
    raw["assume_stable"] = True
    verdict = check_stability(ModelValidator.validate_walk(raw))
    assert verdict.stable is False


def test_srbm_stability():
    stable = SrbmSpec(mu=(-1.0, -1.0), sigma=((1.0, 0.0), (0.0, 1.0)), R=((1.0, 0.0), (0.0, 1.0)))
    verdict = check_stability(stable)
    assert verdict.stable and verdict.verified

    unstable = SrbmSpec(mu=(1.0, -1.0), sigma=((1.0, 0.0), (0.0, 1.0)), R=((1.0, 0.0), (0.0, 1.0)))
    with pytest.raises(UnstableModelError):
        check_stability(unstable)
    assert check_stability(unstable, strict=False).stable is False


def test_fluid_stability():
    verdict = check_stability(FluidSpec(lam=1.0, mu=4.0, c=1, r=2.0))
    assert verdict.stable
    assert verdict.details["xi_0"] == pytest.approx(0.75)
    assert verdict.details["mean_net_rate"] == pytest.approx(-0.25)

    with pytest.raises(UnstableModelError):
        check_stability(FluidSpec(lam=1.0, mu=4.0, c=1, r=4.0))
    with pytest.raises(UnstableModelError):
        check_stability(FluidSpec(lam=5.0, mu=4.0, c=1, r=0.5))


def test_mmc_stationary():
    xi, busy = mmc_stationary(1.0, 4.0, 1)
    assert xi.tolist() == pytest.approx([0.75])
    assert busy == pytest.approx(0.25)

    xi, busy = mmc_stationary(1.0, 1.0, 2)
    assert xi.tolist() == pytest.approx([1 / 3, 1 / 3])
    assert busy == pytest.approx(1 / 3)


def test_two_demand_parameters(case1_walk):
    assert two_demand_parameters(case1_walk) == pytest.approx((0.2, 0.3, 0.5))
    assert two_demand_parameters(ModelValidator.validate_walk(product_form_dict())) is None


def test_two_demand_walk_rejects_bad_rates():
    with pytest.raises(ValueError):
        two_demand_walk(0.2, 0.3, 0.6)
