import numpy as np
import pytest

from processors.oracle import (
    boundary_csv,
    boundary_sequence,
    default_window,
    eval_gf,
    fit_tail,
    gth_solve,
    solve_truncated,
    vertical_sequence,
)
from utils.exceptions import OutsideConvergenceError, WindowTooNoisyError
from utils.validators import ModelValidator

from conftest import clamped_walk_dict, product_form_dict

RHO1, RHO2 = 0.6, 0.5


def _product_pi(size):
    m = np.arange(size)
    return np.outer((1 - RHO1) * RHO1 ** m, (1 - RHO2) * RHO2 ** m)


@pytest.fixture
def product_solution():
    return solve_truncated(ModelValidator.validate_walk(product_form_dict()), N=60, method="qbd")


def test_gth_two_state_chain():
    pi = gth_solve(np.array([[0.9, 0.1], [0.5, 0.5]]))
    assert pi.tolist() == pytest.approx([5 / 6, 1 / 6])


def test_gth_ignores_the_diagonal():
    P = np.array([[0.9, 0.1], [0.5, 0.5]])
    Q = P - np.eye(2)
    assert gth_solve(Q).tolist() == pytest.approx(gth_solve(P).tolist())


def test_gth_rejects_non_square():
    with pytest.raises(ValueError):
        gth_solve(np.ones((2, 3)))


def test_qbd_matches_product_form(product_solution):
    ts = product_solution
    assert ts.method == "qbd"
    assert not ts.x_truncated
    assert ts.residual < 1e-12
    assert np.allclose(ts.pi[:10, :10], _product_pi(10), atol=1e-12)
    assert ts.pi.sum() + ts.beyond_mass == pytest.approx(1.0, abs=1e-12)


@pytest.mark.slow
def test_gth_matches_product_form():
    ts = solve_truncated(ModelValidator.validate_walk(product_form_dict()), N=50, method="gth")
    assert ts.x_truncated
    assert ts.pi.sum() == pytest.approx(1.0)
    assert np.allclose(ts.pi[:10, :10], _product_pi(10), atol=1e-10)


def test_absorbing_origin_gives_point_mass():
    interior = [[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]]
    ts = solve_truncated(ModelValidator.validate_walk(clamped_walk_dict(interior)), N=50, method="gth")
    assert ts.pi00 == pytest.approx(1.0)
    assert ts.pi.sum() == pytest.approx(1.0)
    assert ts.mass_at_edge == 0.0


def test_truncation_below_minimum_rejected(case1_walk):
    with pytest.raises(ValueError):
        solve_truncated(case1_walk, N=10)
    with pytest.raises(ValueError):
        solve_truncated(case1_walk, N=60, method="lu")


def test_sequences(product_solution):
    seq = boundary_sequence(product_solution)
    assert seq.size == 60
    assert seq[0] == pytest.approx((1 - RHO1) * RHO1 * (1 - RHO2))
    assert vertical_sequence(product_solution)[0] == pytest.approx((1 - RHO1) * (1 - RHO2) * RHO2)
    assert boundary_csv(product_solution).splitlines()[0] == "n,pi_n0"


def test_generating_functions(product_solution):
    ts = product_solution
    assert eval_gf(ts, "pi1", 0.0) == pytest.approx(ts.pi[1, 0])
    # P2(1) = P(first coordinate is 0)
    assert eval_gf(ts, "P2", 1.0) == pytest.approx(1 - RHO1, abs=1e-10)
    # pi1(x) = (1-rho1)(1-rho2) rho1 / (1 - rho1 x)
    x = 1.2
    expected = (1 - RHO1) * (1 - RHO2) * RHO1 / (1 - RHO1 * x)
    assert eval_gf(ts, "pi1", x) == pytest.approx(expected, rel=1e-7)
    expected_prime = (1 - RHO1) * (1 - RHO2) * RHO1 ** 2 / (1 - RHO1 * x) ** 2
    assert eval_gf(ts, "pi1", x, derivative=True) == pytest.approx(expected_prime, rel=1e-5)
    value, bound = eval_gf(ts, "pi2", 1.0, return_bound=True)
    assert bound < 1e-12
    with pytest.raises(OutsideConvergenceError):
        eval_gf(ts, "pi1", 10.0)
    with pytest.raises(ValueError):
        eval_gf(ts, "pi3", 0.5)


def test_fit_on_exact_geometric_sequence():
    n = np.arange(1, 301)
    seq = 0.3 * 0.7 ** (n - 1)
    fit = fit_tail(seq, (100, 250))
    assert fit.theta_hat == pytest.approx(0.7, abs=1e-9)
    assert fit.alpha_hat == pytest.approx(0.0, abs=1e-6)
    assert fit.c_hat == pytest.approx(0.3, rel=1e-6)
    assert fit.accepted


def test_fit_on_power_corrected_sequence():
    n = np.arange(1, 401, dtype=float)
    seq = 0.2 * n ** -0.5 * 0.5 ** (n - 1)
    fit = fit_tail(seq, (100, 300))
    assert fit.theta_hat == pytest.approx(0.5, abs=1e-5)
    assert fit.alpha_hat == pytest.approx(-0.5, abs=1e-2)


def test_fit_index_offset():
    n = np.arange(1, 301)
    seq = 0.3 * 0.7 ** n
    fit = fit_tail(seq, (100, 250), index_offset=0)
    assert fit.c_hat == pytest.approx(0.3, rel=1e-6)


def test_fit_window_too_short():
    seq = 0.5 ** np.arange(1, 50)
    with pytest.raises(WindowTooNoisyError):
        fit_tail(seq, (10, 12))
    with pytest.raises(WindowTooNoisyError):
        fit_tail(np.zeros(100), (10, 60))


def test_default_window(product_solution):
    n0, n1 = default_window(product_solution)
    assert (n0, n1) == (30, 48)


@pytest.mark.slow
def test_two_demand_oracle_tail(case1_walk):
    ts = solve_truncated(case1_walk, N=400, method="qbd")
    seq = boundary_sequence(ts)
    fit = fit_tail(seq, default_window(ts), index_offset=0)
    assert fit.theta_hat == pytest.approx(2.0 / 3.0, abs=1e-3)
    assert fit.alpha_hat == pytest.approx(0.0, abs=0.1)
    assert fit.c_hat == pytest.approx(2.0 / 15.0, rel=0.05)
    # P2(1) = 1 - lam/mu1
    assert eval_gf(ts, "P2", 1.0) == pytest.approx(1.0 / 3.0, abs=1e-8)


if __name__ == '__main__':
    test_gth_two_state_chain()
    test_gth_ignores_the_diagonal()
    test_fit_on_exact_geometric_sequence()
    print('Oracle tests passed.')
