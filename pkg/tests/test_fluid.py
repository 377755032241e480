import math

import numpy as np
import pytest

from models.spec_models import FluidSpec
from tools.fluid import (
    continued_fraction,
    find_alpha_star,
    fluid_branch_points,
    fluid_branches,
    fluid_classify,
    fluid_dump,
    fluid_kernel,
    fluid_z0,
    h1_hat,
    mm1_case_scan,
    mm1_constants,
)
from utils.exceptions import OnCutError, RecursionPoleError


@pytest.fixture
def mm1():
    return FluidSpec(lam=1.0, mu=4.0, c=1, r=2.0)


def test_branch_points(mm1):
    fk = fluid_kernel(mm1)
    alpha1, alpha2 = fluid_branch_points(fk)
    assert alpha1 == pytest.approx(0.5)
    assert alpha2 == pytest.approx(4.5)
    assert fk.delta(alpha1) == pytest.approx(0.0, abs=1e-12)


def test_z0_and_vieta(mm1):
    fk = fluid_kernel(mm1)
    assert complex(fluid_z0(fk, 0.0)) == pytest.approx(1.0)
    for alpha in (0.2, 0.3 + 0.7j, 6.0):
        z0, z1 = fluid_branches(fk, alpha)
        assert z0 * z1 == pytest.approx(fk.c * fk.mu / fk.lam)
        assert abs(fk.H(alpha, z0)) < 1e-12
    # Z0 = 4/3 at alpha = 1/3
    assert complex(fluid_z0(fk, 1.0 / 3.0)) == pytest.approx(4.0 / 3.0)


def test_alpha_of_z_inverts_the_kernel(mm1):
    fk = fluid_kernel(mm1)
    for z in (0.5, 2.0, 3.0 + 1.0j):
        assert abs(fk.H(fk.alpha_of_z(z), z)) < 1e-12


def test_branches_on_cut(mm1):
    fk = fluid_kernel(mm1)
    with pytest.raises(OnCutError):
        fluid_branches(fk, 2.0)


def test_continued_fraction():
    fk = fluid_kernel(FluidSpec(lam=1.0, mu=1.0, c=2, r=0.5))
    assert continued_fraction(fk, 0.0) == pytest.approx(1.0)
    # A_0 = mu / (alpha + lam)
    assert continued_fraction(fk, 0.5) == pytest.approx(1.0 / 1.5)
    with pytest.raises(RecursionPoleError):
        continued_fraction(fk, -1.0)
    # c = 1 has no recursion
    assert continued_fraction(fluid_kernel(FluidSpec(lam=1.0, mu=4.0, c=1, r=2.0)), 0.3) == 0


def test_trivial_zero_at_the_origin():
    fk = fluid_kernel(FluidSpec(lam=1.0, mu=1.5, c=2, r=1.0))
    assert abs(h1_hat(fk, 0.0, 1.0)) < 1e-14
    assert complex(fluid_z0(fk, 0.0)) == pytest.approx(1.0)


def test_case1_closed_form(mm1):
    fk = fluid_kernel(mm1)
    alpha_star, k = find_alpha_star(fk)
    assert alpha_star == pytest.approx(1.0 / 3.0, rel=1e-9)
    assert k == 1

    label, forms, _ = fluid_classify(mm1, alpha_star, k)
    assert label.case_id == 1
    assert label.x_dom == pytest.approx(1.0 / 3.0)
    density = forms["density"]
    assert density.rate == pytest.approx(1.0 / 3.0)
    assert density.power == 0.0
    assert density.constant == pytest.approx(5.0 / 36.0, rel=1e-6)
    assert density.provenance == "closed_form"
    assert forms["marginal"].constant == pytest.approx(-0.625, rel=1e-6)

    boundary = forms["boundary"]
    assert boundary.rate == pytest.approx(0.25)
    assert boundary.index_offset == -1


def test_mm1_constants_case1(mm1):
    constants = mm1_constants(fluid_kernel(mm1), 1, 1.0 / 3.0)
    assert constants["Pi0_0"] == pytest.approx(0.25)
    assert constants["numerator"] == pytest.approx(1.0 / 9.0)
    assert constants["c"] == pytest.approx(0.138889, rel=1e-5)
    assert constants["C_total"] == pytest.approx(1.5 * constants["C"])
    with pytest.raises(ValueError):
        mm1_constants(fluid_kernel(mm1), 3, 0.5)


def test_case2_at_the_critical_fill_rate():
    spec = FluidSpec(lam=1.0, mu=4.0, c=1, r=1.0)
    fk = fluid_kernel(spec)
    alpha_star, k = find_alpha_star(fk)
    assert alpha_star == pytest.approx(1.0, rel=1e-9)
    assert k == 1

    label, forms, _ = fluid_classify(spec, alpha_star, k)
    assert label.case_id == 2
    assert label.coincidence
    assert forms["density"].power == pytest.approx(-0.5)

    constants = mm1_constants(fk, 2, label.x_dom)
    assert constants["numerator"] == pytest.approx(1.0)
    assert constants["c"] == pytest.approx(1.0 / (2.0 * math.sqrt(2.0)))
    assert forms["density"].constant == pytest.approx(constants["c"] / math.sqrt(math.pi))


def test_case3_for_two_servers():
    spec = FluidSpec(lam=1.0, mu=1.0, c=2, r=0.5)
    fk = fluid_kernel(spec)
    alpha_star, k = find_alpha_star(fk)
    assert math.isinf(alpha_star)

    label, forms, _ = fluid_classify(spec, alpha_star, k)
    assert label.case_id == 3
    assert label.x_dom == pytest.approx(fluid_branch_points(fk)[0])
    assert forms["density"].power == pytest.approx(-1.5)
    assert forms["density"].constant is None


def test_case_scan_touches_the_branch_point_once():
    rows = mm1_case_scan(1.0, 4.0, [0.5, 1.0, 2.0])
    assert [row["case_id"] for row in rows] == [1, 2, 1]
    for row in rows:
        assert row["alpha_star"] <= row["alpha1"] * (1 + 1e-9)
        assert row["alpha_star"] == pytest.approx(4.0 / (row["r"] + 1.0) - 1.0, rel=1e-8)


def test_fluid_dump(mm1):
    dump = fluid_dump(fluid_kernel(mm1))
    assert set(dump) >= {"H", "H1", "H2", "H0", "A_c_minus_2", "H1_hat", "branch_points"}
    assert dump["branch_points"]["alpha"] == pytest.approx([0.5, 4.5])
    assert dump["branch_points"]["z_dom"] == pytest.approx(4.0)
    assert "z" in dump["H"]["expression"]


def test_z0_is_vectorized(mm1):
    fk = fluid_kernel(mm1)
    values = fluid_z0(fk, np.array([0.0, 0.25, 0.5]))
    assert values.shape == (3,)
    assert values[2] == pytest.approx(2.0)
