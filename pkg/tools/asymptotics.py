"""From the singular behaviour of a boundary transform to the tail of its coefficients.

If (1 - x/R)^alpha f(x) -> g at the dominant singularity R, the coefficients
satisfy a_k ~ g / Gamma(alpha) * k^(alpha-1) * R^(-k). Boundary probabilities
pi_{n,0} are the coefficients of x^(n-1) in pi1(x), so sequence forms are
written against theta^(n-1) with theta = 1/R unless stated otherwise.
"""
from __future__ import annotations
from typing import Callable, List, Optional, Sequence, Tuple
import logging
import math

import numpy as np
from scipy.special import gamma as gamma_fn, gammaln

from config.settings import Settings
from models.kernel_models import BranchPoints, KernelSystem
from models.oracle_models import TruncatedSolution
from models.singularity_models import CaseLabel, Provenance, SingularBehavior, TailForm
from models.spec_models import WalkSpec
from processors.model_processor import two_demand_parameters
from processors.oracle import eval_gf
from tools.kernel import AnalyticBranch
from utils.exceptions import DegenerateExponentError, NoConvergenceError, OracleRequiredError

logger = logging.getLogger(__name__)

__all__ = [
    "CASE_EXPONENTS",
    "singular_behavior",
    "tauberian_map",
    "continuous_tauberian_map",
    "richardson",
    "constants_2demand",
    "constant_numeric",
    "interplay_pi1",
    "synthetic_log_coefficients",
    "transform_value",
]

# case -> (alpha, statement made for the derivative)
CASE_EXPONENTS = {
    1: (1.0, False),
    2: (0.5, False),
    3: (0.5, True),
    4: (2.0, False),
}


def singular_behavior(case_id: int, g: Optional[float] = None, multiplicity: int = 1) -> SingularBehavior:
    """Exponent at x_dom for a case label; a pole of order k in Case 1 gives alpha = k."""
    alpha, derivative = CASE_EXPONENTS[case_id]
    if case_id == 1:
        alpha = float(multiplicity)
    return SingularBehavior(alpha=alpha, derivative=derivative, g=g)


def _check_exponent(sb: SingularBehavior) -> None:
    if sb.alpha <= 0 and float(sb.alpha).is_integer():
        raise DegenerateExponentError(f"alpha = {sb.alpha} is a non-positive integer", alpha=sb.alpha)
    if sb.g is not None and sb.g == 0:
        raise DegenerateExponentError("limit constant g vanishes", alpha=sb.alpha)


def tauberian_map(
    sb: SingularBehavior,
    x_dom: float,
    provenance: Provenance = "unavailable",
    error_band: Optional[float] = None,
    index_offset: int = 1,
) -> TailForm:
    """Coefficient tail c * n^power * theta^(n - index_offset) of a transform with behaviour ``sb``.

    With ``derivative`` the limit is for f'(x), and the coefficients follow from
    k a_k ~ g / Gamma(alpha) (k-1)^(alpha-1) R^(-(k-1)).

    Raises:
        DegenerateExponentError: alpha is a non-positive integer or g = 0
    """
    _check_exponent(sb)
    power = sb.alpha - (2.0 if sb.derivative else 1.0)
    factor = (x_dom if sb.derivative else 1.0) / gamma_fn(sb.alpha)
    constant = None if sb.g is None else sb.g * factor
    band = None if error_band is None else abs(error_band * factor)
    form = TailForm(
        variable="n",
        rate=1.0 / x_dom,
        power=power,
        constant=constant,
        provenance=provenance if constant is not None else "unavailable",
        error_band=band,
        index_offset=1,
    )
    return form.with_offset(index_offset)


def continuous_tauberian_map(
    sb: SingularBehavior,
    tau: float,
    provenance: Provenance = "unavailable",
    error_band: Optional[float] = None,
) -> TailForm:
    """Tail c * x^power * exp(-tau x) of a density whose transform satisfies (tau - s)^alpha phi(s) -> g.

    With ``derivative`` the limit is for phi'(s), i.e. for x f(x).
    """
    _check_exponent(sb)
    power = sb.alpha - (2.0 if sb.derivative else 1.0)
    factor = 1.0 / gamma_fn(sb.alpha)
    constant = None if sb.g is None else sb.g * factor
    return TailForm(
        variable="x",
        rate=tau,
        power=power,
        constant=constant,
        provenance=provenance if constant is not None else "unavailable",
        error_band=None if error_band is None else abs(error_band * factor),
    )


def richardson(values: Sequence[float], ratio: float) -> Tuple[float, float]:
    """Richardson table for values at steps h, h/ratio, h/ratio^2, ...

    The error is assumed to expand in powers of the step. Returns the final
    estimate and its distance to the best estimate one order lower.
    """
    column = [float(v) for v in values]
    if len(column) < 2:
        return column[0], math.inf
    previous = column
    for m in range(1, len(values)):
        t = ratio ** m
        previous, column = column, [(t * column[j + 1] - column[j]) / (t - 1.0) for j in range(len(column) - 1)]
    return column[0], abs(column[0] - previous[-1])


def observed_constant_ratio(
    seq: Sequence[float],
    form: TailForm,
    n_end: int,
    depth: Optional[int] = None,
    start: int = 1,
) -> Tuple[float, float]:
    """Limit of seq[n - start] / form.predict(n), extrapolated in 1/n.

    Samples n_end, n_end/2, n_end/4, ... (depth points) so the 1/n, 1/n^2, ...
    corrections to the tail cancel. Returns (ratio, band).

    Raises:
        ValueError: form has no constant or n_end is outside the sequence
    """
    if form.constant is None:
        raise ValueError("Tail form has no constant")
    seq = np.asarray(seq, dtype=float)
    if not start <= n_end <= start + seq.size - 1:
        raise ValueError(f"n_end={n_end} outside the sequence")
    depth = depth or Settings.VERIFY_RATIO_DEPTH
    # halving must stay above a few states
    while depth > 1 and n_end // 2 ** (depth - 1) < 4:
        depth -= 1
    step = 2 ** (depth - 1)
    n_top = (n_end // step) * step
    ns = [n_top // 2 ** k for k in range(depth - 1, -1, -1)]
    values = [seq[n - start] / form.predict(n) for n in ns]
    return richardson(values, 2.0)


def constants_2demand(
    spec: WalkSpec,
    case_id: int,
    bp: BranchPoints,
    ts: Optional[TruncatedSolution] = None,
) -> Tuple[float, Provenance]:
    """Constant of pi_{m,0} ~ c m^power theta^m for the 2-demand model (m-indexed).

    Raises:
        ValueError: spec is not a 2-demand walk
        OracleRequiredError: Case 3 without a truncated solution
    """
    params = two_demand_parameters(spec)
    if params is None:
        raise ValueError("Not a 2-demand walk")
    lam, mu1, mu2 = params
    x_hat = mu1 / lam
    p2_at_one = 1.0 - lam / mu1
    x1, x2, x3 = bp.x[0], bp.x[1], bp.x[2]

    if case_id == 1:
        return (mu2 - lam * x_hat) * p2_at_one / mu2, "closed_form"
    if case_id == 2:
        radical = math.sqrt(mu1 * mu2 * (x_hat - x1) * (x_hat - x2))
        return mu1 * (x_hat - 1.0) * p2_at_one / (radical * math.sqrt(math.pi)), "closed_form"
    if case_id == 3:
        if ts is None:
            raise OracleRequiredError("Case 3 constant needs P2 and P2' from the truncated solution")
        y0 = (x3 - mu1) / (2.0 * lam * x3 * x3)
        p2 = float(np.real(eval_gf(ts, "P2", y0)))
        p2_prime = float(np.real(eval_gf(ts, "P2", y0, derivative=True)))
        radical = math.sqrt(4.0 * mu2 * lam * x3 * (x3 - x1) * (x3 - x2))
        prefactor = (x3 - 1.0) * mu1 * radical / (4.0 * mu2 * lam * x3 ** 3 * math.sqrt(math.pi))
        bracket = (p2 + y0 * (1.0 - y0) * p2_prime) / (y0 - 1.0) ** 2
        return prefactor * bracket, "numeric_estimate"
    raise ValueError(f"The 2-demand model has no Case {case_id}")


def interplay_pi1(ks: KernelSystem, branch: AnalyticBranch, ts: TruncatedSolution) -> Callable[[float], float]:
    """pi1(x) = (-h2(x,Y0) pi2(Y0) - h0(x,Y0) pi00) / h1(x,Y0) with pi2 and pi00 from ``ts``."""
    pi00 = ts.pi00
    skip_pi2 = ks.h2_vanishes

    def pi1(x: float) -> float:
        y0 = branch.min_branch(np.array([x]))[0]
        numerator = -ks.h0_value(x, y0) * pi00
        if not skip_pi2:
            numerator -= ks.h2_value(x, y0) * eval_gf(ts, "pi2", y0)
        return float(np.real(numerator / ks.h1_value(x, y0)))

    return pi1


def constant_numeric(
    ks: KernelSystem,
    bp: BranchPoints,
    label: CaseLabel,
    ts: TruncatedSolution,
    depth: Optional[int] = None,
    start: Optional[int] = None,
) -> Tuple[float, float]:
    """Estimate g = lim (1 - x/x_dom)^alpha pi1(x) (pi1' for Case 3) by Richardson extrapolation.

    Returns (g, error band).

    Raises:
        NoConvergenceError: the extrapolation spread exceeds RICHARDSON_MAX_SPREAD of |g|
    """
    depth = depth or Settings.RICHARDSON_DEPTH
    start = start or Settings.RICHARDSON_START
    x_dom = label.x_dom
    alpha, derivative = CASE_EXPONENTS[label.case_id]
    # Cases 2 and 3 expand in powers of sqrt(1 - x/x_dom)
    ratio = 10.0 if label.case_id in (1, 4) else math.sqrt(10.0)
    pi1 = interplay_pi1(ks, AnalyticBranch(ks, bp, "y"), ts)

    samples: List[float] = []
    for k in range(start, start + depth):
        eps = 10.0 ** (-k)
        x = x_dom * (1.0 - eps)
        if derivative:
            h = 1e-2 * x_dom * eps
            value = (pi1(x + h) - pi1(x - h)) / (2.0 * h)
        else:
            value = pi1(x)
        samples.append(eps ** alpha * value)
    logger.debug(f"interplay samples: {samples}")
    estimate, band = richardson(samples, ratio)
    if not math.isfinite(estimate) or band > Settings.RICHARDSON_MAX_SPREAD * abs(estimate):
        raise NoConvergenceError(
            f"Richardson spread {band:.3e} too large for estimate {estimate:.6g}",
            estimate=estimate, spread=band, samples=samples,
        )
    return estimate, band


def synthetic_log_coefficients(alpha: float, R: float, g: float, n_terms: int, exact: bool = False) -> np.ndarray:
    """log a_k, k = 0..n_terms-1, for a_k = g k^(alpha-1) R^(-k) / Gamma(alpha).

    With ``exact`` the coefficients of g (1 - z/R)^(-alpha) are used instead,
    which share the same asymptotics.
    """
    k = np.arange(n_terms, dtype=float)
    if exact:
        log_a = gammaln(k + alpha) - gammaln(alpha) - gammaln(k + 1.0)
    else:
        log_a = np.empty(n_terms)
        log_a[1:] = (alpha - 1.0) * np.log(k[1:]) - gammaln(alpha)
        # 0^(alpha-1): 1 for alpha = 1, 0 above; the k = 0 term is dropped below 1
        log_a[0] = -gammaln(alpha) if alpha == 1.0 else -np.inf
    return log_a + math.log(g) - k * math.log(R)


def transform_value(log_coefficients: np.ndarray, z: float) -> float:
    """sum a_k z^k for positive real z, summed in log space."""
    k = np.arange(log_coefficients.size, dtype=float)
    return float(np.sum(np.exp(log_coefficients + k * math.log(z))))
