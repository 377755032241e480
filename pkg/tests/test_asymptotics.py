import math

import numpy as np
import pytest

from models.singularity_models import SingularBehavior, TailForm
from processors.oracle import solve_truncated
from tools.asymptotics import (
    constant_numeric,
    constants_2demand,
    continuous_tauberian_map,
    observed_constant_ratio,
    richardson,
    singular_behavior,
    synthetic_log_coefficients,
    tauberian_map,
    transform_value,
)
from tools.kernel import branch_points, build_kernel
from tools.singularity import classify, pole_candidates
from utils.exceptions import DegenerateExponentError, OracleRequiredError
from utils.validators import ModelValidator

from conftest import product_form_dict


def test_simple_pole_maps_to_geometric_tail():
    form = tauberian_map(singular_behavior(1, g=2.0), 1.5, provenance="closed_form")
    assert form.rate == pytest.approx(2.0 / 3.0)
    assert form.power == 0.0
    assert form.constant == pytest.approx(2.0)
    assert form.index_offset == 1
    assert form.provenance == "closed_form"


def test_index_offset_rewrites_the_constant():
    form = tauberian_map(singular_behavior(1, g=2.0), 1.5)
    shifted = form.with_offset(0)
    assert shifted.constant == pytest.approx(3.0)
    for n in (1, 7, 40):
        assert shifted.predict(n) == pytest.approx(form.predict(n))


def test_square_root_cases():
    form = tauberian_map(singular_behavior(2, g=1.0), 2.0)
    assert form.power == pytest.approx(-0.5)
    assert form.constant == pytest.approx(1.0 / math.sqrt(math.pi))

    form = tauberian_map(singular_behavior(3, g=1.0), 2.0)
    assert form.power == pytest.approx(-1.5)
    assert form.constant == pytest.approx(2.0 / math.sqrt(math.pi))


def test_double_pole():
    form = tauberian_map(singular_behavior(4, g=0.5), 4.0)
    assert form.power == pytest.approx(1.0)
    assert form.constant == pytest.approx(0.5)
    assert form.rate == pytest.approx(0.25)


def test_pole_multiplicity_sets_the_exponent():
    assert singular_behavior(1, multiplicity=3).alpha == 3.0
    assert singular_behavior(2, multiplicity=3).alpha == 0.5


def test_unknown_constant_leaves_shape_only():
    form = tauberian_map(singular_behavior(3), 2.0, provenance="numeric_estimate")
    assert form.constant is None
    assert form.provenance == "unavailable"
    with pytest.raises(ValueError):
        form.predict(10)


def test_degenerate_exponent():
    with pytest.raises(DegenerateExponentError):
        tauberian_map(singular_behavior(1, g=0.0), 1.5)
    with pytest.raises(DegenerateExponentError):
        tauberian_map(SingularBehavior(alpha=0.0, g=1.0), 1.5)


def test_continuous_map():
    form = continuous_tauberian_map(singular_behavior(3, g=1.0), 2.0)
    assert form.variable == "x"
    assert form.rate == 2.0
    assert form.power == pytest.approx(-1.5)
    assert form.predict(1.0) == pytest.approx(math.exp(-2.0) / math.sqrt(math.pi))


def test_richardson_removes_polynomial_error():
    values = [3.0 + 2.0 * h + 5.0 * h * h for h in (1e-1, 1e-2, 1e-3, 1e-4)]
    estimate, band = richardson(values, 10.0)
    assert estimate == pytest.approx(3.0, abs=1e-10)
    assert band < 1e-8

    assert richardson([1.5], 10.0) == (1.5, math.inf)


def test_observed_constant_ratio_cancels_1_over_n_corrections():
    form = TailForm(rate=0.35, power=-1.5, constant=1.2, index_offset=0)
    n = np.arange(1, 401, dtype=float)
    seq = 1.2 * n ** -1.5 * 0.35 ** n * (1.0 - 17.9 / n + 40.0 / n ** 2)
    # a single point at the end of the window is off by about 6%
    assert seq[319] / form.predict(320) == pytest.approx(0.944, abs=1e-3)
    ratio, band = observed_constant_ratio(seq, form, 320)
    assert ratio == pytest.approx(1.0, abs=1e-9)
    assert band < 1e-2

    exact = 1.2 * n ** -1.5 * 0.35 ** n
    assert observed_constant_ratio(exact, form, 320, depth=1) == (pytest.approx(1.0), math.inf)
    with pytest.raises(ValueError):
        observed_constant_ratio(seq, form, 401)
    with pytest.raises(ValueError):
        observed_constant_ratio(seq, TailForm(rate=0.35, power=-1.5), 320)


@pytest.mark.parametrize(
    "alpha, R, g, exact, atol",
    [
        (1.0, 2.0, 1.0, False, 1e-6),
        (0.5, 2.0, 1.0, True, 1e-6),
        (2.0, 1.5, 0.7, False, 1e-4),
    ],
)
def test_synthetic_transforms_recover_the_limit(alpha, R, g, exact, atol):
    log_a = synthetic_log_coefficients(alpha, R, g, n_terms=500000, exact=exact)
    z = R * (1.0 - 1e-4)
    value = transform_value(log_a, z)
    assert (1.0 - z / R) ** alpha * value == pytest.approx(g, abs=atol)


def test_two_demand_constants(case1_walk, case2_walk, case3_walk):
    bp = branch_points(build_kernel(case1_walk))
    value, provenance = constants_2demand(case1_walk, 1, bp)
    assert value == pytest.approx(2.0 / 15.0)
    assert provenance == "closed_form"

    bp = branch_points(build_kernel(case2_walk))
    value, _ = constants_2demand(case2_walk, 2, bp)
    assert value == pytest.approx(0.2 / math.sqrt(0.32 * math.pi), rel=1e-6)

    bp = branch_points(build_kernel(case3_walk))
    with pytest.raises(OracleRequiredError):
        constants_2demand(case3_walk, 3, bp)


def test_two_demand_constants_need_a_two_demand_walk():
    spec = ModelValidator.validate_walk(product_form_dict())
    bp = branch_points(build_kernel(spec))
    with pytest.raises(ValueError):
        constants_2demand(spec, 1, bp)


@pytest.mark.slow
def test_numeric_constant_matches_the_closed_form(case1_walk):
    ks = build_kernel(case1_walk)
    bp = branch_points(ks)
    label = classify(pole_candidates(ks, bp))
    ts = solve_truncated(case1_walk, N=400, method="qbd")

    g, band = constant_numeric(ks, bp, label, ts)
    assert band < 0.1 * abs(g)
    form = tauberian_map(singular_behavior(1, g=g), label.x_dom).with_offset(0)
    closed, provenance = constants_2demand(case1_walk, 1, bp)
    assert provenance == "closed_form"
    assert closed == pytest.approx(2.0 / 15.0)
    assert form.constant == pytest.approx(closed, rel=0.02)


@pytest.mark.slow
def test_case3_constant_is_stable_in_the_truncation(case3_walk):
    bp = branch_points(build_kernel(case3_walk))
    estimates = []
    for N in (200, 400):
        value, provenance = constants_2demand(case3_walk, 3, bp, solve_truncated(case3_walk, N=N, method="qbd"))
        assert provenance == "numeric_estimate"
        estimates.append(value)
    assert estimates[1] == pytest.approx(estimates[0], rel=1e-3)
    assert estimates[1] == pytest.approx(1.18, rel=0.02)
