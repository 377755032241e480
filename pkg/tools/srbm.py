"""Semimartingale reflected Brownian motion in the quadrant.

gamma(x, y) = a y^2 + b(x) y + c(x) with a = S22/2, b(x) = mu2 + S12 x and
c(x) = S11 x^2 / 2 + mu1 x. D1 has degree two with roots x1 <= 0 < x2, and the
branch Y0 is Y- on the plane cut along (-inf, x1] and [x2, inf).
"""
from __future__ import annotations
from typing import Any, Dict, List, Optional, Tuple
import logging
import math

import numpy as np
import numpy.polynomial.polynomial as P
import sympy as sp

from config.settings import Settings
from models.kernel_models import SrbmKernel
from models.singularity_models import CaseLabel, PoleCandidates, TailForm
from models.spec_models import SrbmSpec
from tools.asymptotics import continuous_tauberian_map, singular_behavior
from tools.kernel import poly_expression
from tools.singularity import classify_candidates
from utils.exceptions import DegenerateCovarianceError, OnCutError
from utils.root_search import find_unique_zero

logger = logging.getLogger(__name__)

__all__ = [
    "srbm_kernel",
    "srbm_branch_points",
    "srbm_mirror_branch_points",
    "srbm_branch_eval",
    "srbm_x_branches",
    "srbm_y0",
    "srbm_x0",
    "y0_is_min_modulus",
    "srbm_poles",
    "closed_form_x_star",
    "independent_components",
    "srbm_classify",
    "srbm_dump",
]


def srbm_kernel(spec: SrbmSpec) -> SrbmKernel:
    return SrbmKernel(mu=spec.mu, sigma=spec.sigma, R=spec.R)


def _quadratic_roots(det: float, B: float, c0: float) -> Tuple[float, float]:
    """Roots r1 <= 0 < r2 of c0 + B x - det x^2 (c0 >= 0, det > 0)."""
    if det <= 0:
        raise DegenerateCovarianceError(f"Covariance determinant {det} is not positive", det=det)
    s = math.sqrt(B * B + 4.0 * det * c0)
    if B >= 0:
        r2 = (B + s) / (2.0 * det)
        r1 = -c0 / (det * r2) if r2 != 0 else 0.0
    else:
        r1 = (B - s) / (2.0 * det)
        r2 = -c0 / (det * r1)
    return r1, r2


def _check_sign_pattern(d: np.ndarray, r1: float, r2: float) -> None:
    width = max(r2 - r1, 1e-12)
    inside = P.polyval(0.5 * (r1 + r2), d)
    outside = P.polyval(np.array([r1 - width, r2 + width]), d)
    if not (inside > 0 and np.all(outside < 0)):
        raise DegenerateCovarianceError("Discriminant sign pattern is not (-, +, -)", roots=[r1, r2])


def srbm_branch_points(sk: SrbmKernel) -> Tuple[float, float]:
    """Roots x1 <= 0 < x2 of D1(x) = mu2^2 + 2(mu2 S12 - S22 mu1) x - det(S) x^2.

    Raises:
        DegenerateCovarianceError: det(S) <= 0
    """
    (s11, s12), (_, s22) = sk.sigma
    mu1, mu2 = sk.mu
    det = s11 * s22 - s12 * s12
    r1, r2 = _quadratic_roots(det, 2.0 * (mu2 * s12 - s22 * mu1), mu2 * mu2)
    _check_sign_pattern(sk.d1, r1, r2)
    return r1, r2


def srbm_mirror_branch_points(sk: SrbmKernel) -> Tuple[float, float]:
    """Roots y1 <= 0 < y2 of D2."""
    (s11, s12), (_, s22) = sk.sigma
    mu1, mu2 = sk.mu
    det = s11 * s22 - s12 * s12
    r1, r2 = _quadratic_roots(det, 2.0 * (mu1 * s12 - s11 * mu2), mu1 * mu1)
    _check_sign_pattern(sk.d2, r1, r2)
    return r1, r2


def _minus_root(a: float, b, d):
    s = np.sqrt(np.asarray(d, dtype=complex))
    return (-b - s) / (2.0 * a), (-b + s) / (2.0 * a)


def srbm_y0(sk: SrbmKernel, xs) -> np.ndarray:
    """Vectorized Y0 = Y- (no cut check)."""
    xs = np.asarray(xs, dtype=complex)
    return _minus_root(sk.a, P.polyval(xs, sk.b), P.polyval(xs, sk.d1))[0]


def srbm_x0(sk: SrbmKernel, ys) -> np.ndarray:
    """Vectorized X0 = X- (no cut check)."""
    ys = np.asarray(ys, dtype=complex)
    return _minus_root(sk.a_tilde, P.polyval(ys, sk.b_tilde), P.polyval(ys, sk.d2))[0]


def _on_real_cut(z: complex, r1: float, r2: float) -> bool:
    tol = Settings.CUT_DISTANCE_TOL * (1.0 + abs(z))
    return abs(z.imag) <= tol and (z.real < r1 - tol or z.real > r2 + tol)


def srbm_branch_eval(sk: SrbmKernel, x: complex, branch_points: Optional[Tuple[float, float]] = None) -> Tuple[complex, complex]:
    """(Y0, Y1) = (Y-, Y+) at x.

    Raises:
        OnCutError: x on (-inf, x1] or [x2, inf) away from the branch points
    """
    x = complex(x)
    x1, x2 = branch_points or srbm_branch_points(sk)
    if _on_real_cut(x, x1, x2):
        raise OnCutError(f"{x} lies on a cut", point=x, cuts=[[-math.inf, x1], [x2, math.inf]])
    y_minus, y_plus = _minus_root(sk.a, P.polyval(x, sk.b), P.polyval(x, sk.d1))
    return complex(y_minus), complex(y_plus)


def srbm_x_branches(sk: SrbmKernel, y: complex, branch_points: Optional[Tuple[float, float]] = None) -> Tuple[complex, complex]:
    """(X0, X1) = (X-, X+) at y."""
    y = complex(y)
    y1, y2 = branch_points or srbm_mirror_branch_points(sk)
    if _on_real_cut(y, y1, y2):
        raise OnCutError(f"{y} lies on a cut", point=y, cuts=[[-math.inf, y1], [y2, math.inf]])
    x_minus, x_plus = _minus_root(sk.a_tilde, P.polyval(y, sk.b_tilde), P.polyval(y, sk.d2))
    return complex(x_minus), complex(x_plus)


def y0_is_min_modulus(sk: SrbmKernel, xs) -> bool:
    """True when |Y-| <= |Y+| at every sample point."""
    xs = np.asarray(xs, dtype=complex)
    y_minus, y_plus = _minus_root(sk.a, P.polyval(xs, sk.b), P.polyval(xs, sk.d1))
    return bool(np.all(np.abs(y_minus) <= np.abs(y_plus) * (1.0 + 1e-12)))


def _endpoint_atol(sk: SrbmKernel, x: float, y: float, eps_eq: float) -> float:
    scale = sum(abs(v) for row in sk.R for v in row)
    return eps_eq * scale * max(1.0, abs(x), abs(y))


def srbm_poles(
    sk: SrbmKernel,
    grid: Optional[int] = None,
    rtol: Optional[float] = None,
    eps_eq: Optional[float] = None,
    consistency_tol: Optional[float] = None,
) -> PoleCandidates:
    """x* = zero of gamma2(x, Y0(x)) on (0, x2]; x~ = X1(y~) for the zero y~ of gamma1(X0(y), y) on (0, y2].

    x~ is kept only when Y0(x~) = y~.

    Raises:
        MultipleZerosError: more than one zero on a search interval
    """
    eps_eq = eps_eq or Settings.EPS_EQ
    tol = consistency_tol or Settings.CONSISTENCY_TOL
    x1, x2 = srbm_branch_points(sk)
    y1, y2 = srbm_mirror_branch_points(sk)

    def gamma2_along_y0(xs: np.ndarray) -> np.ndarray:
        return sk.gamma2(xs, srbm_y0(sk, xs))

    def gamma1_along_x0(ys: np.ndarray) -> np.ndarray:
        return sk.gamma1(srbm_x0(sk, ys), ys)

    x_end = float(np.real(srbm_y0(sk, x2)))
    x_star = find_unique_zero(
        gamma2_along_y0, 0.0, x2, grid=grid, rtol=rtol,
        endpoint_atol=_endpoint_atol(sk, x2, x_end, eps_eq), label="gamma2(x,Y0(x))",
    )
    y_end = float(np.real(srbm_x0(sk, y2)))
    y_tilde = find_unique_zero(
        gamma1_along_x0, 0.0, y2, grid=grid, rtol=rtol,
        endpoint_atol=_endpoint_atol(sk, y_end, y2, eps_eq), label="gamma1(X0(y),y)",
    )

    x_tilde, rejected = math.inf, None
    if math.isfinite(y_tilde):
        candidate = srbm_x_branches(sk, y_tilde, (y1, y2))[1].real
        try:
            y0 = srbm_branch_eval(sk, candidate, (x1, x2))[0]
            consistent = abs(y0 - y_tilde) < tol * (1.0 + abs(y_tilde))
        except OnCutError:
            consistent = False
        if consistent:
            x_tilde = candidate
        else:
            rejected = candidate
            logger.debug(f"x~ = X1({y_tilde}) = {candidate} rejected by the Y0 consistency filter")
    return PoleCandidates(
        x_star=x_star,
        y_tilde=None if math.isinf(y_tilde) else y_tilde,
        x_tilde1=x_tilde,
        branch_point=x2,
        rejected_x_tilde1=rejected,
        provenance={"x_star": "numeric_estimate", "x_tilde1": "numeric_estimate", "branch_point": "closed_form"},
    )


def closed_form_x_star(sk: SrbmKernel) -> Optional[float]:
    """Intersection of the line gamma2 = 0 with the kernel ellipse on the Y0 sheet, if in (0, x2]."""
    (r11, r12), (r21, r22) = sk.R
    (s11, s12), _ = sk.sigma
    mu1, mu2 = sk.mu
    k = -r12 / r22
    denominator = sk.a * k * k + s12 * k + s11 / 2.0
    if denominator == 0:
        return None
    x = -(mu1 + mu2 * k) / denominator
    _, x2 = srbm_branch_points(sk)
    if not 0 < x <= x2 * (1.0 + Settings.EPS_EQ):
        return None
    y0 = complex(srbm_y0(sk, min(x, x2)))
    if abs(y0 - k * x) > 1e-8 * (1.0 + abs(k * x)):
        return None
    return x


def independent_components(spec: SrbmSpec) -> bool:
    """R diagonal and S12 = 0: the coordinates are independent reflected Brownian motions."""
    (r11, r12), (r21, r22) = spec.R
    return r12 == 0 and r21 == 0 and spec.sigma12 == 0


def srbm_classify(
    spec: SrbmSpec,
    pc: PoleCandidates,
    eps_eq: Optional[float] = None,
) -> Tuple[CaseLabel, TailForm, List[str]]:
    """Case label for tau1 and the tail of V2(x, inf) ~ C x^power exp(-tau1 x)."""
    label = classify_candidates(pc.x_star, pc.x_tilde1, pc.branch_point, eps_eq, labels=("x*", "x~", "x2"))
    notes: List[str] = []
    form = continuous_tauberian_map(singular_behavior(label.case_id), label.x_dom)
    if independent_components(spec) and label.case_id == 1:
        form = form.model_copy(update={"constant": -spec.mu[1] / spec.R[1][1], "provenance": "closed_form"})
        notes.append("independent components: V2(x, inf) = (-mu2/r22) exp(-tau1 x)")
    else:
        form = form.model_copy(update={"note": "positive constant; no closed form for this model"})
    return label, form, notes


def srbm_dump(sk: SrbmKernel) -> Dict[str, Any]:
    """Kernel coefficients, boundary lines and branch points of the SRBM."""
    x, y = sp.symbols("x y")
    out: Dict[str, Any] = {}
    for name, coeffs, var in (
        ("a", [sk.a], x), ("b", sk.b, x), ("c", sk.c, x), ("D1", sk.d1, x),
        ("a_tilde", [sk.a_tilde], y), ("b_tilde", sk.b_tilde, y), ("c_tilde", sk.c_tilde, y), ("D2", sk.d2, y),
    ):
        out[name] = {"coefficients": [float(v) for v in coeffs], "expression": poly_expression(coeffs, var)}
    (r11, r12), (r21, r22) = sk.R
    out["gamma1"] = {"coefficients": [r11, r21], "expression": str(sp.Float(r11) * x + sp.Float(r21) * y)}
    out["gamma2"] = {"coefficients": [r12, r22], "expression": str(sp.Float(r12) * x + sp.Float(r22) * y)}
    out["branch_points"] = {"x": list(srbm_branch_points(sk)), "y": list(srbm_mirror_branch_points(sk))}
    return out
