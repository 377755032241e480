import copy

import pytest

from utils.exceptions import (
    DegenerateCovarianceError,
    ModelValidationError,
    NegativeEntryError,
    NonStochasticError,
    UnknownFamilyError,
    WrongShapeError,
)
from utils.validators import ModelValidator

from conftest import clamped_walk_dict, product_form_dict


def test_validate_walk_accepts_product_form():
    spec = ModelValidator.validate_model(product_form_dict())
    assert spec.family == "rwqp"
    assert spec.prob("interior", 1, 1) == pytest.approx(0.09)
    assert spec.prob("hwall", 0, 0) == pytest.approx(0.2 * 0.7)
    # jumps outside a kernel's support have probability zero
    assert spec.prob("vwall", -1, 0) == 0.0


def test_point_mass_walk_is_valid():
    interior = [[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]]
    spec = ModelValidator.validate_walk(clamped_walk_dict(interior))
    assert spec.jumps("origin") == [(0, 0, 1.0)]


def test_non_stochastic_kernel_rejected():
    raw = product_form_dict()
    raw["interior"][1][1] -= 0.01
    with pytest.raises(NonStochasticError) as excinfo:
        ModelValidator.validate_model(raw)
    assert excinfo.value.details["kernel"] == "interior"
    assert excinfo.value.details["deviation"] == pytest.approx(-0.01)


def test_negative_entry_rejected():
    raw = product_form_dict()
    raw["vwall"][0][0] = -0.1
    raw["vwall"][0][1] += 0.1
    with pytest.raises(NegativeEntryError):
        ModelValidator.validate_model(raw)


def test_wrong_shape_rejected():
    raw = product_form_dict()
    raw["hwall"] = [[0.5, 0.5], [0.0, 0.0]]
    with pytest.raises(WrongShapeError):
        ModelValidator.validate_model(raw)

    raw = product_form_dict()
    del raw["origin"]
    with pytest.raises(WrongShapeError):
        ModelValidator.validate_model(raw)


def test_unknown_family_rejected():
    with pytest.raises(UnknownFamilyError):
        ModelValidator.validate_model({"family": "queue"})


def test_validation_errors_are_value_errors():
    with pytest.raises(ValueError):
        ModelValidator.validate_model({"family": "queue"})


def test_srbm_sigma_must_be_symmetric(srbm_raw):
    raw = copy.deepcopy(srbm_raw)
    raw["sigma"] = [[1.0, 0.2], [0.1, 1.0]]
    with pytest.raises(DegenerateCovarianceError):
        ModelValidator.validate_model(raw)


def test_srbm_sigma_must_be_positive_definite(srbm_raw):
    raw = copy.deepcopy(srbm_raw)
    raw["sigma"] = [[1.0, 1.0], [1.0, 1.0]]
    with pytest.raises(DegenerateCovarianceError):
        ModelValidator.validate_model(raw)


def test_fluid_fields(fluid_raw):
    spec = ModelValidator.validate_model(fluid_raw)
    assert spec.lam == 1.0 and spec.c == 1
    assert spec.net_rate(0) == -1.0
    assert spec.net_rate(1) == 2.0

    bad = dict(fluid_raw, c=0)
    with pytest.raises(ModelValidationError):
        ModelValidator.validate_model(bad)
    bad = dict(fluid_raw, c=1.5)
    with pytest.raises(ModelValidationError):
        ModelValidator.validate_model(bad)
    bad = dict(fluid_raw, r=-1.0)
    with pytest.raises(ModelValidationError):
        ModelValidator.validate_model(bad)


def test_to_model_dict_round_trip(srbm_raw, fluid_raw):
    for raw in (product_form_dict(), srbm_raw, fluid_raw):
        spec = ModelValidator.validate_model(raw)
        assert ModelValidator.validate_model(spec.to_model_dict()) == spec
