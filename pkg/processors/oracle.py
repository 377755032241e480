"""Truncated-chain ground truth for the discrete walk.

Three solvers produce a TruncatedSolution:

* ``gth``   dense GTH elimination on the box {0..N}^2
* ``qbd``   matrix-geometric solution, levels m unbounded, phases n <= N
* ``power`` lazy power iteration with Aitken extrapolation on the sparse box

Moves that would leave the box through the frontier are clamped onto it, so
every truncated chain stays stochastic.
"""
from __future__ import annotations
from typing import Dict, List, Optional, Sequence, Tuple, Union
import logging
import math

import numpy as np
import numpy.polynomial.polynomial as P
import scipy.sparse as sparse
from tenacity import retry, retry_if_exception_type, stop_after_attempt
from tqdm import tqdm

from config.settings import Settings
from models.oracle_models import TailFit, TruncatedSolution
from models.spec_models import WalkSpec
from utils.exceptions import (
    NotConvergedError,
    OutsideConvergenceError,
    TruncationSuspectError,
    WindowTooNoisyError,
)
from utils.number_format import csv_text

logger = logging.getLogger(__name__)

__all__ = [
    "gth_solve",
    "solve_truncated",
    "boundary_sequence",
    "vertical_sequence",
    "eval_gf",
    "truncation_bound",
    "effective_truncation",
    "default_window",
    "fit_tail",
    "boundary_csv",
]

GF_KINDS = ("pi1", "pi2", "pi", "P1", "P2")


def gth_solve(A: np.ndarray) -> np.ndarray:
    """Stationary distribution of a stochastic (or generator) matrix by GTH elimination.

    Only off-diagonal entries are used. When the states {0..k} hold a closed
    class the reduction stops there and the solution is supported on it.
    """
    A1 = np.array(A, dtype=float)
    if A1.ndim != 2 or A1.shape[0] != A1.shape[1]:
        raise ValueError("matrix must be square")
    n = A1.shape[0]
    x = np.zeros(n)

    for i in range(n - 1):
        scale = np.sum(A1[i, i + 1:n])
        if scale <= 0:
            n = i + 1
            break
        A1[i + 1:n, i] /= scale
        A1[i + 1:n, i + 1:n] += np.outer(A1[i + 1:n, i], A1[i, i + 1:n])

    x[n - 1] = 1.0
    for i in range(n - 2, -1, -1):
        x[i] = np.dot(x[i + 1:n], A1[i + 1:n, i])
    return x / np.sum(x)


def _region(m: int, n: int) -> str:
    if m > 0 and n > 0:
        return "interior"
    if m > 0:
        return "hwall"
    if n > 0:
        return "vwall"
    return "origin"


def box_transition_matrix(spec: WalkSpec, N: int) -> sparse.csr_matrix:
    """Sparse transition matrix of the walk clamped to {0..N}^2; state (m, n) -> m(N+1) + n."""
    side = N + 1
    m, n = np.divmod(np.arange(side * side), side)
    masks = {
        "interior": (m > 0) & (n > 0),
        "hwall": (m > 0) & (n == 0),
        "vwall": (m == 0) & (n > 0),
        "origin": (m == 0) & (n == 0),
    }
    rows: List[np.ndarray] = []
    cols: List[np.ndarray] = []
    vals: List[np.ndarray] = []
    for which, mask in masks.items():
        src = np.flatnonzero(mask)
        for i, j, p in spec.jumps(which):
            tm = np.clip(m[src] + i, 0, N)
            tn = np.clip(n[src] + j, 0, N)
            rows.append(src)
            cols.append(tm * side + tn)
            vals.append(np.full(src.size, p))
    size = side * side
    return sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(size, size)
    ).tocsr()


def _box_diagnostics(spec: WalkSpec, N: int, method: str, x: np.ndarray, Pm: sparse.csr_matrix) -> TruncatedSolution:
    x = np.maximum(x, 0.0)
    x = x / x.sum()
    residual = float(np.abs(Pm.T @ x - x).sum())
    pi = x.reshape(N + 1, N + 1)
    edge = float(pi[N, :].sum() + pi[:, N].sum() - pi[N, N])
    return TruncatedSolution(N=N, method=method, pi=pi, residual=residual, mass_at_edge=edge, x_truncated=True)


def _solve_gth(spec: WalkSpec, N: int) -> TruncatedSolution:
    Pm = box_transition_matrix(spec, N)
    logger.debug(f"GTH on {Pm.shape[0]} states")
    return _box_diagnostics(spec, N, "gth", gth_solve(Pm.toarray()), Pm)


def _aitken(x0: np.ndarray, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    d1 = x1 - x0
    d2 = x2 - 2.0 * x1 + x0
    with np.errstate(divide="ignore", invalid="ignore"):
        acc = x2 - (x2 - x1) ** 2 / d2
    # fall back where the denominator is negligible or the update is not a probability
    ok = (np.abs(d2) > 1e-30) & np.isfinite(acc) & (acc >= 0) & (np.abs(d1) > 0)
    out = np.where(ok, acc, x2)
    return out / out.sum()


def _power_iterate(spec: WalkSpec, N: int, max_iter: int) -> TruncatedSolution:
    Pm = box_transition_matrix(spec, N)
    lazy = (0.5 * (Pm + sparse.identity(Pm.shape[0], format="csr"))).T.tocsr()
    x = np.full(Pm.shape[0], 1.0 / Pm.shape[0])
    every = Settings.ORACLE_AITKEN_EVERY
    history: List[np.ndarray] = []
    residual = math.inf
    bar = tqdm(total=max_iter, desc="Power iteration", disable=not Settings.SHOW_PROGRESS)
    try:
        for k in range(1, max_iter + 1):
            x = lazy @ x
            bar.update(1)
            if k % every >= every - 3:
                history.append(x.copy())
            if k % every == 0:
                if len(history) >= 3:
                    x = _aitken(*history[-3:])
                history.clear()
                residual = float(np.abs(Pm.T @ x - x).sum())
                if residual < Settings.ORACLE_RESIDUAL_TOL:
                    logger.debug(f"power iteration converged after {k} steps")
                    return _box_diagnostics(spec, N, "power", x, Pm)
    finally:
        bar.close()
    raise NotConvergedError(
        f"Power iteration did not reach residual {Settings.ORACLE_RESIDUAL_TOL:g} in {max_iter} steps",
        residual=residual,
        iterations=max_iter,
    )


def _solve_power(spec: WalkSpec, N: int) -> TruncatedSolution:
    budget = {"max_iter": Settings.ORACLE_POWER_MAX_ITER}

    @retry(
        stop=stop_after_attempt(Settings.ORACLE_POWER_ATTEMPTS),
        retry=retry_if_exception_type(NotConvergedError),
        reraise=True,
    )
    def attempt() -> TruncatedSolution:
        try:
            return _power_iterate(spec, N, budget["max_iter"])
        except NotConvergedError:
            budget["max_iter"] *= 4
            logger.warning(f"power iteration stalled, retrying with {budget['max_iter']} steps")
            raise

    return attempt()


def _qbd_blocks(spec: WalkSpec, N: int) -> Dict[str, np.ndarray]:
    """Level blocks for levels m >= 1 (A_-1, A0, A1) and level 0 (B0, B1)."""
    side = N + 1
    blocks = {name: np.zeros((side, side)) for name in ("A-1", "A0", "A1", "B0", "B1")}
    names = {"A": {-1: "A-1", 0: "A0", 1: "A1"}, "B": {0: "B0", 1: "B1"}}
    for n in range(side):
        for which, prefix in ((_region(1, n), "A"), (_region(0, n), "B")):
            for i, j, p in spec.jumps(which):
                blocks[names[prefix][i]][n, min(n + j, N)] += p
    return blocks


def _logarithmic_reduction(Am1: np.ndarray, A0: np.ndarray, A1: np.ndarray) -> np.ndarray:
    """Minimal solution G of G = A_-1 + A0 G + A1 G^2."""
    eye = np.eye(A0.shape[0])
    H = np.linalg.solve(eye - A0, A1)
    L = np.linalg.solve(eye - A0, Am1)
    G = L.copy()
    T = H.copy()
    ones = np.ones(A0.shape[0])
    for k in range(Settings.ORACLE_LR_MAX_ITER):
        U = H @ L + L @ H
        H = np.linalg.solve(eye - U, H @ H)
        L = np.linalg.solve(eye - U, L @ L)
        G = G + T @ L
        T = T @ H
        if np.max(np.abs(ones - G @ ones)) < Settings.ORACLE_LR_TOL:
            logger.debug(f"logarithmic reduction converged after {k + 1} steps")
            return G
    raise NotConvergedError(
        "Logarithmic reduction did not converge",
        defect=float(np.max(np.abs(ones - G @ ones))),
        iterations=Settings.ORACLE_LR_MAX_ITER,
    )


def _solve_qbd(spec: WalkSpec, N: int) -> TruncatedSolution:
    b = _qbd_blocks(spec, N)
    side = N + 1
    G = _logarithmic_reduction(b["A-1"], b["A0"], b["A1"])
    R = b["A1"] @ np.linalg.inv(np.eye(side) - b["A0"] - b["A1"] @ G)
    censored = np.block([[b["B0"], b["B1"]], [b["A-1"], b["A0"] + b["A1"] @ G]])
    boundary = gth_solve(censored)
    pi0, pi1 = boundary[:side], boundary[side:]
    tail_sum = np.linalg.solve((np.eye(side) - R).T, pi1)  # pi1 (I - R)^-1
    total = pi0.sum() + tail_sum.sum()
    pi0, pi1, tail_sum = pi0 / total, pi1 / total, tail_sum / total

    levels = np.zeros((side, side))
    levels[0], levels[1] = pi0, pi1
    for m in tqdm(range(2, side), desc="Matrix-geometric levels", disable=not Settings.SHOW_PROGRESS):
        levels[m] = levels[m - 1] @ R
    beyond = levels[N] @ R
    beyond_mass = float(np.linalg.solve((np.eye(side) - R).T, beyond).sum())

    defect = np.abs(pi0 @ b["B0"] + pi1 @ b["A-1"] - pi0).sum()
    defect += np.abs(pi0 @ b["B1"] + pi1 @ b["A0"] + levels[2] @ b["A-1"] - pi1).sum()
    for m in range(2, N):
        defect += np.abs(levels[m - 1] @ b["A1"] + levels[m] @ b["A0"] + levels[m + 1] @ b["A-1"] - levels[m]).sum()
    edge = float(pi0[N] + tail_sum[N])
    return TruncatedSolution(
        N=N, method="qbd", pi=levels, residual=float(defect), mass_at_edge=edge,
        beyond_mass=beyond_mass, x_truncated=False,
    )


def solve_truncated(spec: WalkSpec, N: Optional[int] = None, method: Optional[str] = None) -> TruncatedSolution:
    """Stationary distribution of the truncated walk.

    Raises:
        ValueError: N below the configured minimum or unknown method
        NotConvergedError: balance residual above ORACLE_RESIDUAL_TOL
        TruncationSuspectError: frontier mass above ORACLE_EDGE_MASS_TOL (solution attached)
    """
    N = N or Settings.ORACLE_TRUNCATION
    method = method or Settings.ORACLE_METHOD
    if N < Settings.ORACLE_MIN_TRUNCATION:
        raise ValueError(f"Truncation N must be at least {Settings.ORACLE_MIN_TRUNCATION}, got {N}")
    if method == "auto":
        method = "gth" if (N + 1) ** 2 <= Settings.GTH_MAX_STATES else "qbd"
    solvers = {"gth": _solve_gth, "qbd": _solve_qbd, "power": _solve_power}
    if method not in solvers:
        raise ValueError(f"Unknown oracle method: {method}")

    logger.info(f"solving truncated chain: method={method}, N={N}")
    solution = solvers[method](spec, N)
    logger.debug(f"residual={solution.residual:.3e} edge mass={solution.mass_at_edge:.3e}")
    if not solution.residual < Settings.ORACLE_RESIDUAL_TOL:
        raise NotConvergedError(
            f"Balance residual {solution.residual:.3e} exceeds {Settings.ORACLE_RESIDUAL_TOL:g}",
            residual=solution.residual, method=method, N=N,
        )
    if solution.mass_at_edge > Settings.ORACLE_EDGE_MASS_TOL:
        raise TruncationSuspectError(
            f"Mass {solution.mass_at_edge:.3e} on the truncation frontier (N={N})",
            solution=solution, mass_at_edge=solution.mass_at_edge, N=N,
        )
    return solution


def boundary_sequence(ts: TruncatedSolution) -> np.ndarray:
    """pi_{n,0} for n = 1..N (element k holds n = k + 1)."""
    return ts.pi[1:, 0].copy()


def vertical_sequence(ts: TruncatedSolution) -> np.ndarray:
    """pi_{0,n} for n = 1..N."""
    return ts.pi[0, 1:].copy()


def _decay_estimate(seq: np.ndarray) -> float:
    """Rough geometric rate of a sequence from its middle section."""
    n = seq.size
    lo, hi = max(1, n // 4), max(2, n // 2)
    a, b = seq[lo - 1], seq[hi - 1]
    if a <= 0 or b <= 0 or hi <= lo:
        return 0.0
    return float((b / a) ** (1.0 / (hi - lo)))


def _series(coeffs: np.ndarray, point, derivative: bool):
    if derivative:
        coeffs = P.polyder(coeffs)
    return P.polyval(point, coeffs)


def eval_gf(
    ts: TruncatedSolution,
    which: str,
    point: Union[complex, Tuple[complex, complex], np.ndarray],
    derivative: bool = False,
    return_bound: bool = False,
):
    """Truncated generating-function value.

    which: "pi1" (sum pi_{m,0} x^(m-1)), "pi2" (sum pi_{0,n} y^(n-1)),
    "P1" (pi00 + x pi1(x)), "P2" (pi00 + y pi2(y)), or "pi" (sum over m,n >= 1
    of pi_{m,n} x^(m-1) y^(n-1), point = (x, y)).

    Raises:
        OutsideConvergenceError: |point| times the fitted decay rate is >= 1
    """
    if which not in GF_KINDS:
        raise ValueError(f"Unknown generating function: {which}")
    if which == "pi":
        x, y = point
        inner = ts.pi[1:, 1:]
        rate_x = _decay_estimate(inner.sum(axis=1))
        rate_y = _decay_estimate(inner.sum(axis=0))
        for z, rate, axis in ((x, rate_x, "x"), (y, rate_y, "y")):
            if np.max(np.abs(z)) * rate >= 1.0:
                raise OutsideConvergenceError(
                    f"|{axis}| beyond the fitted radius {1.0 / rate if rate else math.inf:.6g}",
                    point=complex(np.max(np.abs(z))), radius=1.0 / rate if rate else math.inf,
                )
        value = P.polyval2d(x, y, inner)
        return (value, 0.0) if return_bound else value

    seq = ts.pi[:, 0] if which in ("pi1", "P1") else ts.pi[0, :]
    coeffs = seq[1:] if which in ("pi1", "pi2") else seq
    rate = _decay_estimate(seq[1:])
    q = float(np.max(np.abs(point))) * rate
    if q >= 1.0:
        raise OutsideConvergenceError(
            f"{which}: |point| = {np.max(np.abs(point)):.6g} beyond the fitted radius {1.0 / rate:.6g}",
            point=complex(np.max(np.abs(point))), radius=1.0 / rate,
        )
    value = _series(coeffs, point, derivative)
    if not return_bound:
        return value
    last = abs(coeffs[-1]) * max(1.0, float(np.max(np.abs(point)))) ** coeffs.size
    bound = last * q / (1.0 - q) * (coeffs.size if derivative else 1.0)
    return value, bound


def truncation_bound(ts: TruncatedSolution) -> np.ndarray:
    """Relative truncation indicator for pi_{n,0}, n = 1..N."""
    base = ts.pi[1:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        if ts.x_truncated:
            ratio = (ts.pi[ts.N, 0] + ts.pi[1:, ts.N]) / base
        else:
            ratio = ts.pi[1:, ts.N] / base
    return np.where(base > 0, ratio, np.inf)


def effective_truncation(ts: TruncatedSolution, bound: Optional[float] = None) -> int:
    """Largest n whose truncation indicator stays below ``bound``."""
    bound = bound or Settings.FIT_TRUNCATION_BOUND
    ok = np.flatnonzero(truncation_bound(ts) < bound)
    return int(ok[-1] + 1) if ok.size else 0


def default_window(ts: TruncatedSolution, fractions: Optional[Tuple[float, float]] = None) -> Tuple[int, int]:
    low, high = fractions or Settings.FIT_WINDOW
    n_eff = effective_truncation(ts)
    return max(1, int(low * n_eff)), int(high * n_eff)


def _ratio_theta(ns: np.ndarray, values: np.ndarray) -> float:
    ratios = values[1:] / values[:-1]
    # r_n = theta (1 + 1/n)^alpha, a polynomial in 1/n to second order
    coeffs = np.polyfit(1.0 / ns[:-1], ratios, 2)
    return float(coeffs[-1])


def _power_fit(ns: np.ndarray, values: np.ndarray, theta: float, index_offset: int) -> Tuple[float, float, float]:
    target = np.log(values) - (ns - index_offset) * math.log(theta)
    design = np.column_stack([np.ones_like(ns), np.log(ns)])
    coef, *_ = np.linalg.lstsq(design, target, rcond=None)
    fitted = design @ coef
    ss_res = float(np.sum((target - fitted) ** 2))
    ss_tot = float(np.sum((target - target.mean()) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(coef[1]), float(math.exp(coef[0])), r_squared


def fit_tail(
    seq: Sequence[float],
    window: Tuple[int, int],
    index_offset: int = 1,
    start: int = 1,
) -> TailFit:
    """Fit seq[n - start] ~ c n^alpha theta^(n - index_offset) on n in [n0, n1].

    Raises:
        WindowTooNoisyError: too few points, or non-positive / non-finite values
    """
    seq = np.asarray(seq, dtype=float)
    n0, n1 = window
    ns = np.arange(max(n0, start), min(n1, start + seq.size - 1) + 1, dtype=float)
    if ns.size < Settings.FIT_MIN_POINTS:
        raise WindowTooNoisyError(f"Fit window {window} holds {ns.size} points", window=list(window))
    values = seq[ns.astype(int) - start]
    if not np.all(np.isfinite(values)) or np.any(values <= 0):
        raise WindowTooNoisyError(f"Non-positive or non-finite values in window {window}", window=list(window))

    theta = _ratio_theta(ns, values)
    if not 0.0 < theta < 1.0 + 1e-9:
        raise WindowTooNoisyError(f"Ratio extrapolation gave theta = {theta}", window=list(window))
    alpha, c, r_squared = _power_fit(ns, values, theta, index_offset)

    joint_design = np.column_stack([np.ones_like(ns), np.log(ns), ns])
    joint, *_ = np.linalg.lstsq(joint_design, np.log(values), rcond=None)
    theta_joint = float(math.exp(joint[2]))

    half = ns.size // 2
    halves = [(ns[:half], values[:half]), (ns[half:], values[half:])]
    theta_halves: List[float] = []
    alpha_halves: List[float] = []
    for hn, hv in halves:
        if hn.size < 4:
            raise WindowTooNoisyError(f"Half window too short in {window}", window=list(window))
        t = _ratio_theta(hn, hv)
        theta_halves.append(t)
        alpha_halves.append(_power_fit(hn, hv, t, index_offset)[0])
    accepted = (
        abs(theta_halves[0] - theta_halves[1]) <= Settings.FIT_THETA_AGREEMENT
        and abs(alpha_halves[0] - alpha_halves[1]) <= Settings.FIT_ALPHA_AGREEMENT
    )
    note = None if accepted else "half-window fits disagree"
    return TailFit(
        theta_hat=theta,
        alpha_hat=alpha,
        c_hat=c,
        window=(int(ns[0]), int(ns[-1])),
        index_offset=index_offset,
        r_squared=r_squared,
        theta_joint=theta_joint,
        theta_halves=tuple(theta_halves),
        alpha_halves=tuple(alpha_halves),
        accepted=accepted,
        note=note,
    )


def boundary_csv(ts: TruncatedSolution) -> str:
    """CSV dump of (n, pi_n0)."""
    seq = boundary_sequence(ts)
    return csv_text(["n", "pi_n0"], ((n, float(v)) for n, v in enumerate(seq, start=1)))
