import math

import numpy as np
import numpy.polynomial.polynomial as P
import pytest

from tools.kernel import AnalyticBranch, branch_points, build_kernel, dump_kernel, eval_branch, x_branches
from utils.exceptions import GenusZeroError, OnCutError, SingularKernelError
from utils.number_format import dumps_deterministic
from utils.validators import ModelValidator

from conftest import clamped_walk_dict


def test_kernel_coefficients_of_two_demand_walk(case1_walk):
    ks = build_kernel(case1_walk)
    # h = lam x^2 y^2 + mu1 y + mu2 x - x y
    assert ks.h_value(2.0, 3.0) == pytest.approx(0.2 * 4 * 9 + 0.3 * 3 + 0.5 * 2 - 6)
    # h1 = mu1 + mu2 x + lam x^2 y - x
    assert ks.h1_value(2.0, 3.0) == pytest.approx(0.3 + 1.0 + 0.2 * 4 * 3 - 2)
    # h2 = mu2 + mu1 y + lam x y^2 - y
    assert ks.h2_value(2.0, 3.0) == pytest.approx(0.5 + 0.9 + 0.2 * 2 * 9 - 3)
    assert ks.h0_value(1.0, 1.0) == pytest.approx(0.0)


def test_branch_points_case1(case1_walk):
    ks = build_kernel(case1_walk)
    bp = branch_points(ks)
    x1, x2, x3, x4 = bp.x
    assert x1 == pytest.approx(0.23, abs=0.01)
    assert x2 == pytest.approx(0.58, abs=0.01)
    assert x3 == pytest.approx(1.69, abs=0.01)
    assert math.isinf(x4) and x4 > 0
    assert bp.degree_x == 3
    for r in (x1, x2, x3):
        assert abs(P.polyval(r, ks.d1)) < 1e-10
    assert abs(bp.y[0]) < bp.y[1] < 1.0 < bp.y[2]


def test_branch_point_x3_for_cases_2_and_3(case2_walk, case3_walk):
    assert branch_points(build_kernel(case2_walk)).x3 == pytest.approx(2.0, rel=1e-10)
    x3 = branch_points(build_kernel(case3_walk)).x3
    assert 2.819 < x3 < 2.821


def test_vieta_relations(case1_walk):
    ks = build_kernel(case1_walk)
    bp = branch_points(ks)
    x = 1.2
    y0, y1 = eval_branch(AnalyticBranch(ks, bp, "y"), x)
    a, b, c = (P.polyval(x, p) for p in (ks.a, ks.b, ks.c))
    assert y0 * y1 == pytest.approx(c / a, rel=1e-10)
    assert y0 + y1 == pytest.approx(-b / a, rel=1e-10)
    assert abs(y0) <= abs(y1)

    y = 1.3
    x0, x1 = x_branches(ks, y, bp)
    a, b, c = (P.polyval(y, p) for p in (ks.a_tilde, ks.b_tilde, ks.c_tilde))
    assert x0 * x1 == pytest.approx(c / a, rel=1e-10)
    assert abs(ks.h_value(x0, y)) < 1e-12


def test_y0_values(case1_walk):
    ks = build_kernel(case1_walk)
    branch = AnalyticBranch(ks, branch_points(ks), "y")
    y0, y1 = branch.evaluate(1.5)
    assert y0 == pytest.approx(1.0)
    assert y1 == pytest.approx(5.0 / 3.0)
    assert branch.evaluate(1.0)[0] == pytest.approx(1.0)
    assert branch.evaluate(1.0)[1] == pytest.approx(2.5)


def test_on_cut_raises(case1_walk):
    ks = build_kernel(case1_walk)
    branch = AnalyticBranch(ks, branch_points(ks), "y")
    with pytest.raises(OnCutError):
        branch.evaluate(0.4)
    with pytest.raises(OnCutError):
        branch.evaluate(2.0)
    # just off the real axis the branch is defined
    y0, _ = branch.evaluate(2.0 + 1e-3j)
    assert abs(ks.h_value(2.0 + 1e-3j, y0)) < 1e-12


def test_branch_path_follows_y0(case1_walk):
    ks = build_kernel(case1_walk)
    branch = AnalyticBranch(ks, branch_points(ks), "y")
    xs = np.linspace(1.0, 1.6, 13)
    with branch.path() as path:
        values = [path.evaluate(x)[0] for x in xs]
    assert np.allclose(values, branch.min_branch(xs))


def test_singular_kernel_rejected():
    interior = [[0.0, 0.3, 0.0], [0.5, 0.0, 0.0], [0.0, 0.2, 0.0]]
    spec = ModelValidator.validate_walk(clamped_walk_dict(interior))
    with pytest.raises(SingularKernelError):
        build_kernel(spec)


def test_zero_drift_walk_has_genus_zero():
    interior = [[0.0, 0.25, 0.0], [0.25, 0.0, 0.25], [0.0, 0.25, 0.0]]
    ks = build_kernel(ModelValidator.validate_walk(clamped_walk_dict(interior)))
    with pytest.raises(GenusZeroError):
        branch_points(ks)


def test_dump_kernel(case1_walk):
    ks = build_kernel(case1_walk)
    dump = dump_kernel(ks, branch_points(ks))
    for key in ("a", "b", "c", "D1", "a_tilde", "b_tilde", "c_tilde", "D2", "h", "h1", "h2", "h0", "branch_points"):
        assert key in dump
    assert dump["a"]["coefficients"] == pytest.approx([0.0, 0.0, 0.2])
    assert "x**2" in dump["a"]["expression"]
    assert len(dump["D1"]["roots"]) == 3
    text = dumps_deterministic(dump)
    assert '"branch_points"' in text


def _random_walk(rng):
    interior = rng.dirichlet(np.ones(9)).reshape(3, 3)
    return interior, ModelValidator.validate_walk(clamped_walk_dict(interior.tolist()))


@pytest.mark.parametrize("seed", range(10))
def test_branch_point_ordering_on_random_walks(seed):
    rng = np.random.default_rng(seed)
    checked = 0
    while checked < 20:
        interior, spec = _random_walk(rng)
        # rows index the x-jump, columns the y-jump
        drift_y = interior[:, 2].sum() - interior[:, 0].sum()
        drift_x = interior[2, :].sum() - interior[0, :].sum()
        if min(abs(drift_x), abs(drift_y)) < 1e-3:
            continue
        bp = branch_points(build_kernel(spec))
        x1, x2, x3, x4 = bp.x
        y1, y2, y3, y4 = bp.y
        assert abs(x1) < x2 < 1.0 < x3 < abs(x4)
        assert abs(y1) < y2 < 1.0 < y3 < abs(y4)
        assert bp.ordering_verified
        checked += 1


def _relative_residual(ks, x, y):
    a, b, c = (P.polyval(x, p) for p in (ks.a, ks.b, ks.c))
    scale = np.abs(a * y * y) + np.abs(b * y) + np.abs(c)
    return np.abs(ks.h_value(x, y)) / scale


@pytest.mark.parametrize("which", ["two_demand", "product_form"])
def test_kernel_residual_on_sampled_points(which, case1_walk, product_walk_raw):
    spec = case1_walk if which == "two_demand" else ModelValidator.validate_walk(product_walk_raw)
    ks = build_kernel(spec)
    branch = AnalyticBranch(ks, branch_points(ks), "y")
    rng = np.random.default_rng(2024)
    xs = rng.uniform(-3.0, 3.0, 1000) + 1j * rng.uniform(-3.0, 3.0, 1000)
    y0, y1 = branch.roots(xs)
    assert np.all(np.abs(y0) <= np.abs(y1))
    assert np.max(_relative_residual(ks, xs, y0)) < 1e-10
    assert np.max(_relative_residual(ks, xs, y1)) < 1e-10


@pytest.mark.parametrize("which", ["two_demand", "product_form"])
def test_vieta_relations_on_a_circle(which, case1_walk, product_walk_raw):
    spec = case1_walk if which == "two_demand" else ModelValidator.validate_walk(product_walk_raw)
    ks = build_kernel(spec)
    bp = branch_points(ks)
    branch = AnalyticBranch(ks, bp, "y")
    for k in range(64):
        z = 1.1 * np.exp(2j * np.pi * (k + 0.5) / 64)

        y0, y1 = eval_branch(branch, z)
        a, b, c = (P.polyval(z, p) for p in (ks.a, ks.b, ks.c))
        assert abs(y0 * y1 - c / a) <= 1e-10 * abs(c / a)
        assert abs(y0 + y1 + b / a) <= 1e-10 * (abs(y0) + abs(y1))

        x0, x1 = x_branches(ks, z, bp)
        a, b, c = (P.polyval(z, p) for p in (ks.a_tilde, ks.b_tilde, ks.c_tilde))
        assert abs(x0 * x1 - c / a) <= 1e-10 * abs(c / a)
        assert abs(x0 + x1 + b / a) <= 1e-10 * (abs(x0) + abs(x1))
