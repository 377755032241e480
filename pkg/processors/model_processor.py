from typing import Dict, List, Optional, Tuple, Union
import logging
import math

import numpy as np
import numpy.polynomial.polynomial as P

from config.settings import Settings
from models.spec_models import DriftVector, FluidSpec, SrbmSpec, StabilityVerdict, WalkClassification, WalkSpec
from tools.kernel import kernel_coefficients
from utils.exceptions import UnstableModelError
from utils.polynomials import has_repeated_root, have_common_root, is_perfect_square, poly_is_zero, poly_trim
from utils.validators import ModelValidator

logger = logging.getLogger(__name__)

AnySpec = Union[WalkSpec, SrbmSpec, FluidSpec]


def _kernel_drift(spec: WalkSpec, which: str) -> Tuple[float, float]:
    jumps = spec.jumps(which)
    mx = math.fsum(i * p for i, _, p in jumps)
    my = math.fsum(j * p for _, j, p in jumps)
    return mx, my


def mean_drift(spec: WalkSpec) -> DriftVector:
    """Mean interior increment M = (Mx, My)."""
    mx, my = _kernel_drift(spec, "interior")
    light = abs(mx) > Settings.DRIFT_ZERO_TOL or abs(my) > Settings.DRIFT_ZERO_TOL
    return DriftVector(Mx=mx, My=my, light_tailed=light)


def classify_walk(spec: WalkSpec) -> WalkClassification:
    """Singularity, genus and X-shape of a walk. Never raises."""
    C = np.asarray(kernel_coefficients(spec))
    a, b, c = C[:, 2], C[:, 1], C[:, 0]
    a_t, b_t, c_t = C[2, :], C[1, :], C[0, :]
    warnings: List[str] = []

    quadratic = not any(poly_is_zero(p) for p in (a, c, a_t, c_t))
    irreducible = True
    if quadratic:
        if have_common_root([a, b, c]) or have_common_root([a_t, b_t, c_t]):
            irreducible = False
            warnings.append("possibly reducible: the kernel has a factor depending on one variable only")
        d1 = poly_trim(P.polysub(P.polymul(b, b), 4.0 * P.polymul(a, c)))
        d2 = poly_trim(P.polysub(P.polymul(b_t, b_t), 4.0 * P.polymul(a_t, c_t)))
        if is_perfect_square(d1) or is_perfect_square(d2):
            irreducible = False
            warnings.append("possibly reducible: the discriminant is a perfect square (bilinear factorization)")
        genus = 0 if (d1.size < 4 or has_repeated_root(d1)) else 1
    else:
        genus = 0

    x_shaped = all(spec.prob("interior", i, j) == 0.0 for i, j in ((1, 0), (-1, 0), (0, 1), (0, -1)))
    for w in warnings:
        logger.warning(w)
    return WalkClassification(
        nonsingular=quadratic and irreducible,
        genus=genus,
        x_shaped=x_shaped,
        irreducible=irreducible,
        warnings=warnings,
    )


def _walk_stability(spec: WalkSpec) -> StabilityVerdict:
    # Drift criteria for ergodicity of nearest-neighbour walks in the quadrant:
    # interior drift M, drift M1 on the horizontal axis, M2 on the vertical axis.
    mx, my = _kernel_drift(spec, "interior")
    m1x, m1y = _kernel_drift(spec, "hwall")
    m2x, m2y = _kernel_drift(spec, "vwall")
    tol = Settings.DRIFT_ZERO_TOL
    details = {"Mx": mx, "My": my, "M1x": m1x, "M1y": m1y, "M2x": m2x, "M2y": m2y}
    horizontal = mx * m1y - my * m1x
    vertical = my * m2x - mx * m2y
    details.update({"horizontal_condition": horizontal, "vertical_condition": vertical})

    def verdict(stable: Optional[bool], reason: str) -> StabilityVerdict:
        return StabilityVerdict(family="rwqp", stable=stable, verified=False, reason=reason, details=details)

    if abs(mx) <= tol and abs(my) <= tol:
        return verdict(None, "zero interior drift: null-recurrent or transient, drift test indeterminate")
    if mx < -tol and my < -tol:
        if abs(horizontal) <= tol or abs(vertical) <= tol:
            return verdict(None, "boundary drift condition on its equality boundary")
        if horizontal < 0 and vertical < 0:
            return verdict(True, "negative interior drift and both boundary conditions hold")
        return verdict(False, "a boundary drift condition fails")
    if mx >= -tol and my < -tol:
        if abs(horizontal) <= tol:
            return verdict(None, "horizontal boundary condition on its equality boundary")
        return verdict(horizontal < 0, "Mx >= 0 > My: horizontal boundary condition decides")
    if mx < -tol and my >= -tol:
        if abs(vertical) <= tol:
            return verdict(None, "vertical boundary condition on its equality boundary")
        return verdict(vertical < 0, "My >= 0 > Mx: vertical boundary condition decides")
    return verdict(False, "non-negative interior drift in both coordinates")


def _srbm_stability(spec: SrbmSpec) -> StabilityVerdict:
    (r11, r12), (r21, r22) = spec.R
    mu1, mu2 = spec.mu
    details = {
        "r11": r11,
        "r22": r22,
        "det_R": r11 * r22 - r12 * r21,
        "r22_mu1_minus_r12_mu2": r22 * mu1 - r12 * mu2,
        "r11_mu2_minus_r21_mu1": r11 * mu2 - r21 * mu1,
    }
    failed = [
        name
        for name, ok in (
            ("r11 > 0", r11 > 0),
            ("r22 > 0", r22 > 0),
            ("det R > 0", details["det_R"] > 0),
            ("r22 mu1 - r12 mu2 < 0", details["r22_mu1_minus_r12_mu2"] < 0),
            ("r11 mu2 - r21 mu1 < 0", details["r11_mu2_minus_r21_mu1"] < 0),
        )
        if not ok
    ]
    if failed:
        return StabilityVerdict(family="srbm", stable=False, verified=True, reason="failed: " + ", ".join(failed), details=details)
    return StabilityVerdict(family="srbm", stable=True, verified=True, reason="R is a P-matrix and R^-1 mu < 0", details=details)


def mmc_stationary(lam: float, mu: float, c: int) -> Tuple[np.ndarray, float]:
    """Stationary law of the M/M/c queue: (xi_0..xi_{c-1}, P(Z >= c)). Requires lam < c mu."""
    a = lam / mu
    rho = lam / (c * mu)
    log_terms = [i * math.log(a) - math.lgamma(i + 1) for i in range(c + 1)]
    scale = max(log_terms)
    terms = np.exp(np.array(log_terms) - scale)
    tail = terms[c] / (1.0 - rho)
    total = float(np.sum(terms[:c])) + tail
    return terms[:c] / total, float(tail / total)


def _fluid_stability(spec: FluidSpec) -> StabilityVerdict:
    details: Dict[str, float] = {"rho": spec.lam / (spec.c * spec.mu)}
    if spec.lam >= spec.c * spec.mu:
        return StabilityVerdict(family="fluid", stable=False, verified=True, reason="driving M/M/c queue is unstable (lambda >= c mu)", details=details)
    xi, busy = mmc_stationary(spec.lam, spec.mu, spec.c)
    mean_rate = math.fsum(xi[i] * spec.net_rate(i) for i in range(spec.c)) + busy * spec.r
    details["mean_net_rate"] = mean_rate
    details["xi_0"] = float(xi[0])
    if mean_rate >= 0:
        return StabilityVerdict(family="fluid", stable=False, verified=True, reason="mean net fluid rate is not negative", details=details)
    return StabilityVerdict(family="fluid", stable=True, verified=True, reason="mean net fluid rate is negative", details=details)


def check_stability(spec: AnySpec, strict: bool = True) -> StabilityVerdict:
    """Stability verdict for any model family.

    SRBM and fluid verdicts are exact. The walk verdict is an advisory drift
    test (``verified`` is False); a walk flagged unstable still passes when the
    spec carries ``assume_stable``.

    Raises:
        UnstableModelError: with ``strict`` when the model is unstable
    """
    if isinstance(spec, WalkSpec):
        verdict = _walk_stability(spec)
    elif isinstance(spec, SrbmSpec):
        verdict = _srbm_stability(spec)
    else:
        verdict = _fluid_stability(spec)
    logger.debug(f"stability [{verdict.family}]: {verdict.stable} ({verdict.reason})")
    overridden = isinstance(spec, WalkSpec) and spec.assume_stable
    if strict and verdict.stable is False and not overridden:
        raise UnstableModelError(f"Unstable model: {verdict.reason}", **verdict.details)
    return verdict


def two_demand_walk(lam: float, mu1: float, mu2: float, name: Optional[str] = None) -> WalkSpec:
    """Kernels of the 2-demand parallel-server walk (uniformized so lam + mu1 + mu2 = 1)."""
    raw = {
        "family": "rwqp",
        "interior": [[0.0, mu1, 0.0], [mu2, 0.0, 0.0], [0.0, 0.0, lam]],
        "hwall": [[mu1, 0.0], [mu2, 0.0], [0.0, lam]],
        "vwall": [[mu2, mu1, 0.0], [0.0, 0.0, lam]],
        "origin": [[mu1 + mu2, 0.0], [0.0, lam]],
    }
    if name:
        raw["name"] = name
    return ModelValidator.validate_walk(raw)


def two_demand_parameters(spec: WalkSpec, tol: float = 1e-12) -> Optional[Tuple[float, float, float]]:
    """(lam, mu1, mu2) when spec is a 2-demand walk, else None."""
    lam = spec.prob("interior", 1, 1)
    mu1 = spec.prob("interior", -1, 0)
    mu2 = spec.prob("interior", 0, -1)
    if min(lam, mu1, mu2) <= 0:
        return None
    try:
        expected = two_demand_walk(lam, mu1, mu2)
    except ValueError:
        return None
    for which in ("interior", "hwall", "vwall", "origin"):
        if np.max(np.abs(spec.kernel(which) - expected.kernel(which))) > tol:
            return None
    return lam, mu1, mu2
