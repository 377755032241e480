"""Fluid queue driven by an M/M/c queue.

H(alpha, z) = -lam z^2 + (-alpha r + lam + c mu) z - c mu has branch points
alpha1,2 = (sqrt(c mu) -/+ sqrt(lam))^2 / r. The dominant singularity of the
boundary transform is min(alpha1, alpha*), alpha* being the zero of
H1^(alpha, Z0(alpha)) on (0, alpha1].
"""
from __future__ import annotations
from typing import Any, Dict, List, Optional, Sequence, Tuple
import logging
import math

import numpy as np
import sympy as sp

from config.settings import Settings
from models.kernel_models import FluidKernel
from models.singularity_models import CaseLabel, TailForm
from models.spec_models import FluidSpec
from tools.asymptotics import continuous_tauberian_map, singular_behavior
from utils.exceptions import OnCutError, RecursionPoleError
from utils.root_search import find_unique_zero

logger = logging.getLogger(__name__)

__all__ = [
    "fluid_kernel",
    "fluid_branch_points",
    "fluid_branches",
    "fluid_z0",
    "continued_fraction",
    "h1_hat",
    "find_alpha_star",
    "fluid_classify",
    "mm1_boundary_transform",
    "mm1_constants",
    "mm1_case_scan",
    "fluid_dump",
]


def fluid_kernel(spec: FluidSpec) -> FluidKernel:
    return FluidKernel(lam=spec.lam, mu=spec.mu, c=spec.c, r=spec.r)


def fluid_branch_points(fk: FluidKernel) -> Tuple[float, float]:
    """(alpha1, alpha2), the zeros of Delta(alpha)."""
    root_cmu, root_lam = math.sqrt(fk.c * fk.mu), math.sqrt(fk.lam)
    return (root_cmu - root_lam) ** 2 / fk.r, (root_cmu + root_lam) ** 2 / fk.r


def _roots(fk: FluidKernel, alpha: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    b = fk.b(alpha)
    s = np.sqrt(fk.delta(alpha).astype(complex))
    alpha1, alpha2 = fluid_branch_points(fk)
    for point in (alpha1, alpha2):
        s = np.where(np.abs(alpha - point) <= Settings.CUT_DISTANCE_TOL * (1.0 + abs(point)), 0.0, s)
    z_plus = (-b + s) / (2.0 * fk.a)
    z_minus = (-b - s) / (2.0 * fk.a)
    # the principal root jumps across Re(alpha) = (lam + c mu)/r; swap there
    left = np.real(alpha) <= fk.cut_abscissa
    return np.where(left, z_plus, z_minus), np.where(left, z_minus, z_plus)


def fluid_z0(fk: FluidKernel, alpha) -> np.ndarray:
    """Vectorized Z0 (no cut check)."""
    return _roots(fk, np.asarray(alpha, dtype=complex))[0]


def fluid_branches(fk: FluidKernel, alpha: complex) -> Tuple[complex, complex]:
    """(Z0, Z1) at alpha.

    Raises:
        OnCutError: alpha strictly inside the real segment (alpha1, alpha2)
    """
    alpha = complex(alpha)
    alpha1, alpha2 = fluid_branch_points(fk)
    tol = Settings.CUT_DISTANCE_TOL * (1.0 + abs(alpha))
    if abs(alpha.imag) <= tol and alpha1 + tol < alpha.real < alpha2 - tol:
        raise OnCutError(f"{alpha} lies on the cut", point=alpha, cuts=[[alpha1, alpha2]])
    z0, z1 = _roots(fk, np.array([alpha]))
    return complex(z0[0]), complex(z1[0])


def continued_fraction(fk: FluidKernel, alpha, upto: Optional[int] = None):
    """A_upto(alpha) from A_-1 = 0, A_i = (i+1) mu / (alpha + lam + i mu - lam A_{i-1}).

    ``upto`` defaults to c - 2; c = 1 gives A_-1 = 0.

    Raises:
        RecursionPoleError: a denominator vanishes
    """
    upto = fk.c - 2 if upto is None else upto
    alpha = np.asarray(alpha, dtype=complex)
    A = np.zeros_like(alpha)
    for i in range(upto + 1):
        denominator = alpha + fk.lam + i * fk.mu - fk.lam * A
        if np.any(np.abs(denominator) < 1e-14):
            raise RecursionPoleError(f"Continued fraction denominator vanishes at index {i}", index=i)
        A = (i + 1) * fk.mu / denominator
    return A if A.ndim else complex(A)


def h1_hat(fk: FluidKernel, alpha, z):
    """H1^(alpha, z) = lam z^c A_{c-2}(alpha) + H1(alpha, z)."""
    return fk.lam * z ** fk.c * continued_fraction(fk, alpha) + fk.H1(alpha, z)


def _along_z0(fk: FluidKernel):
    def f(alphas: np.ndarray) -> np.ndarray:
        alphas = np.asarray(alphas, dtype=complex)
        return h1_hat(fk, alphas, fluid_z0(fk, alphas))
    return f


def _multiplicity(fk: FluidKernel, alpha_star: float) -> Tuple[int, float]:
    """Vanishing order of H1^(alpha, Z0(alpha)) at alpha_star from a log-slope over two decades."""
    f = _along_z0(fk)
    deltas = alpha_star * np.array([1e-3, 1e-5])
    values = np.abs(f(alpha_star - deltas))
    if np.any(values <= 0) or not np.all(np.isfinite(values)):
        return 1, math.nan
    slope = float(np.log(values[0] / values[1]) / np.log(deltas[0] / deltas[1]))
    return max(1, int(round(slope))), slope


def find_alpha_star(
    fk: FluidKernel,
    grid: Optional[int] = None,
    rtol: Optional[float] = None,
    eps_eq: Optional[float] = None,
) -> Tuple[float, int]:
    """(alpha*, multiplicity k): zero of H1^(alpha, Z0(alpha)) in (0, alpha1], or (+inf, 1).

    Raises:
        MultipleZerosError: more than one zero (at most one is assumed)
    """
    eps_eq = eps_eq or Settings.EPS_EQ
    alpha1, _ = fluid_branch_points(fk)
    f = _along_z0(fk)
    z_end = abs(fluid_z0(fk, alpha1))
    atol = eps_eq * (fk.lam + fk.c * fk.mu + fk.r * alpha1) * max(1.0, z_end) ** fk.c
    alpha_star = find_unique_zero(f, 0.0, alpha1, grid=grid, rtol=rtol, endpoint_atol=atol, label="H1^(alpha,Z0(alpha))")
    if math.isinf(alpha_star):
        return alpha_star, 1
    k, slope = _multiplicity(fk, alpha_star)
    logger.debug(f"alpha* = {alpha_star}, log-slope {slope:.3f} -> k = {k}")
    return alpha_star, k


def mm1_boundary_transform(fk: FluidKernel, alpha) -> complex:
    """phi0(alpha) = -Pi0(0) lam Z0 (Z0 - 1) / H1(alpha, Z0) for c = 1."""
    rho = fk.lam / fk.mu
    pi0 = 1.0 - rho * (fk.r + 1.0)
    z0 = fluid_z0(fk, alpha)
    return -pi0 * fk.lam * z0 * (z0 - 1.0) / fk.H1(alpha, z0)


def mm1_constants(fk: FluidKernel, case_id: int, alpha_dom: float) -> Dict[str, float]:
    """Closed-form constants of the M/M/1-driven queue.

    ``c`` is the limit of (alpha_dom - alpha)^s phi0(alpha) (s = 1 or 1/2), ``C``
    the density constant of pi0(x), ``C_total`` the constant of the total
    density and ``marginal`` the constant of Pi(x) - 1.
    """
    lam, mu, r = fk.lam, fk.mu, fk.r
    pi0 = 1.0 - lam / mu * (r + 1.0)
    z0 = complex(fluid_z0(fk, alpha_dom)).real
    numerator = pi0 * lam * z0 * (z0 - 1.0)
    slope = mu - alpha_dom * (r + 1.0)
    if case_id == 1:
        z0_prime = r * z0 / (fk.b(alpha_dom) - 2.0 * lam * z0)
        h1_prime = -(r + 1.0) * z0 + slope * z0_prime
        c = numerator / h1_prime
        density = c
    elif case_id == 2:
        K = -math.sqrt(2.0 * r * fk.b(alpha_dom)) / (2.0 * lam)
        c = -numerator / (slope * K)
        density = c / math.sqrt(math.pi)
    else:
        raise ValueError(f"No closed form for Case {case_id}")
    total = (r + 1.0) / r * density
    return {
        "Pi0_0": pi0,
        "numerator": numerator,
        "c": c,
        "C": density,
        "C_total": total,
        "marginal": -total / alpha_dom,
    }


def fluid_classify(
    spec: FluidSpec,
    alpha_star: float,
    k: int,
    eps_eq: Optional[float] = None,
) -> Tuple[CaseLabel, Dict[str, TailForm], List[str]]:
    """Three-case label and the density, boundary and marginal tail forms."""
    fk = fluid_kernel(spec)
    eps = eps_eq or Settings.EPS_EQ
    alpha1, _ = fluid_branch_points(fk)
    notes: List[str] = []
    near_degenerate = False
    if math.isinf(alpha_star):
        case_id, alpha_dom = 3, alpha1
    else:
        gap = abs(alpha_star - alpha1) / alpha1
        if gap <= eps:
            case_id, alpha_dom = 2, alpha1
            notes.append("alpha* coincides with the branch point alpha1")
        else:
            case_id, alpha_dom = 1, alpha_star
            if gap <= Settings.NEAR_DEGENERATE_FACTOR * eps:
                near_degenerate = True
                notes.append(f"near-degenerate: alpha* and alpha1 differ by {gap:.3g} (relative)")
                logger.warning(notes[-1])
        if case_id == 1 and k > 1:
            notes.append(f"alpha* has multiplicity {k}")

    label = CaseLabel(
        case_id=case_id, x_dom=alpha_dom, coincidence=case_id == 2, near_degenerate=near_degenerate, notes=notes,
    )
    shape = continuous_tauberian_map(singular_behavior(case_id, multiplicity=k), alpha_dom)
    density = shape
    marginal = shape
    if spec.c == 1 and case_id in (1, 2):
        constants = mm1_constants(fk, case_id, alpha_dom)
        density = shape.model_copy(update={"constant": constants["C"], "provenance": "closed_form"})
        marginal = shape.model_copy(update={"constant": constants["marginal"], "provenance": "closed_form"})
    boundary = TailForm(
        variable="n", rate=1.0 / fk.z_dom, power=0.0, constant=None, provenance="unavailable", index_offset=-1,
        note="Pi_i(0) ~ d (1/z_dom)^(i+1)",
    )
    forms = {"density": density, "boundary": boundary, "marginal": marginal}
    return label, forms, notes


def mm1_case_scan(lam: float, mu: float, rs: Sequence[float], eps_eq: Optional[float] = None) -> List[Dict[str, Any]]:
    """Case label and alpha* - alpha1 along a range of fill rates r (c = 1)."""
    rows = []
    for r in rs:
        spec = FluidSpec(lam=lam, mu=mu, c=1, r=r)
        fk = fluid_kernel(spec)
        alpha_star, k = find_alpha_star(fk, eps_eq=eps_eq)
        label, _, _ = fluid_classify(spec, alpha_star, k, eps_eq)
        rows.append({"r": r, "alpha_star": alpha_star, "alpha1": fluid_branch_points(fk)[0], "case_id": label.case_id})
    return rows


def fluid_dump(fk: FluidKernel) -> Dict[str, Any]:
    """Symbolic kernel, boundary kernels and branch points of the fluid queue."""
    alpha, z = sp.symbols("alpha z")
    lam, mu, r = sp.Float(fk.lam), sp.Float(fk.mu), sp.Float(fk.r)
    c = fk.c
    A = sp.Integer(0)
    for i in range(c - 1):
        A = (i + 1) * mu / (alpha + lam + i * mu - lam * A)
    H1 = (mu - alpha * r - alpha) * z ** c - c * mu * z ** (c - 1)
    exprs = {
        "H": -lam * z ** 2 + (-alpha * r + lam + c * mu) * z - c * mu,
        "H2": lam * z ** 2 - lam * z - c * mu * z + c * mu,
        "H1": H1,
        "H0": mu * z ** c - c * mu * z ** (c - 1),
        "A_c_minus_2": A,
        "H1_hat": lam * z ** c * A + H1,
    }
    alpha1, alpha2 = fluid_branch_points(fk)
    out: Dict[str, Any] = {name: {"expression": str(sp.expand(e) if name != "H1_hat" else e)} for name, e in exprs.items()}
    out["branch_points"] = {"alpha": [alpha1, alpha2], "cut_abscissa": fk.cut_abscissa, "z_dom": fk.z_dom}
    return out
