"""Pole candidates x*, x~1 and the four-case classification of the dominant singularity."""
from __future__ import annotations
from typing import Any, Dict, List, Optional, Tuple
import logging
import math

import numpy as np
import sympy as sp

from config.settings import Settings
from models.kernel_models import BranchPoints, KernelSystem
from models.singularity_models import CaseLabel, PoleCandidates
from tools.kernel import AnalyticBranch
from utils.exceptions import OnCutError, PoleOfBranchError
from utils.polynomials import poly_trim, polynomial_roots, split_real_roots
from utils.root_search import find_unique_zero

logger = logging.getLogger(__name__)

__all__ = [
    "find_x_star",
    "find_x_tilde",
    "pole_candidates",
    "classify_candidates",
    "classify",
    "cross_check_x_star",
]


def _grid_scale(grid) -> float:
    return float(np.sum(np.abs(np.asarray(grid))))


def _endpoint_atol(grid, x: float, y: float, eps_eq: float) -> float:
    g = np.asarray(grid)
    return eps_eq * _grid_scale(g) * max(1.0, abs(x)) ** (g.shape[0] - 1) * max(1.0, abs(y)) ** (g.shape[1] - 1)


def find_x_star(
    ks: KernelSystem,
    bp: BranchPoints,
    grid: Optional[int] = None,
    rtol: Optional[float] = None,
    eps_eq: Optional[float] = None,
) -> float:
    """Unique zero of h1(x, Y0(x)) in (1, x3], or +inf.

    Raises:
        MultipleZerosError: more than one zero in the interval
    """
    eps_eq = eps_eq or Settings.EPS_EQ
    branch = AnalyticBranch(ks, bp, "y")
    x3 = bp.x3

    def h1_along_y0(xs: np.ndarray) -> np.ndarray:
        return ks.h1_value(xs, branch.min_branch(xs))

    y_end = branch.min_branch(np.array([x3]))[0].real
    atol = _endpoint_atol(ks.h1, x3, y_end, eps_eq)
    x_star = find_unique_zero(h1_along_y0, 1.0, x3, grid=grid, rtol=rtol, endpoint_atol=atol, label="h1(x,Y0(x))")
    logger.debug(f"x* = {x_star}")
    return x_star


def find_x_tilde(
    ks: KernelSystem,
    bp: BranchPoints,
    grid: Optional[int] = None,
    rtol: Optional[float] = None,
    eps_eq: Optional[float] = None,
    consistency_tol: Optional[float] = None,
) -> Tuple[Optional[float], float, Optional[float]]:
    """Mirror pole: (y~0, x~1, rejected x~1).

    y~0 is the unique zero of h2(X0(y), y) in (1, y3]. x~1 = X1(y~0) is kept only
    when Y0(x~1) = y~0; otherwise it is returned in the third slot and x~1 is +inf.
    """
    eps_eq = eps_eq or Settings.EPS_EQ
    tol = consistency_tol or Settings.CONSISTENCY_TOL
    x_branch = AnalyticBranch(ks, bp, "x")
    y3 = bp.y3

    def h2_along_x0(ys: np.ndarray) -> np.ndarray:
        return ks.h2_value(x_branch.min_branch(ys), ys)

    x_end = x_branch.min_branch(np.array([y3]))[0].real
    atol = _endpoint_atol(ks.h2, x_end, y3, eps_eq)
    y_tilde = find_unique_zero(h2_along_x0, 1.0, y3, grid=grid, rtol=rtol, endpoint_atol=atol, label="h2(X0(y),y)")
    if math.isinf(y_tilde):
        return None, math.inf, None

    _, x1 = x_branch.roots(np.array([y_tilde]))
    candidate = complex(x1[0])
    if not math.isfinite(abs(candidate)) or abs(candidate.imag) > Settings.ROOT_IMAG_TOL * (1.0 + abs(candidate)):
        logger.debug(f"x~1 = X1({y_tilde}) is not a finite real point")
        return y_tilde, math.inf, None
    x_tilde = candidate.real
    try:
        y0, _ = AnalyticBranch(ks, bp, "y").evaluate(x_tilde)
    except (OnCutError, PoleOfBranchError):
        logger.debug(f"x~1 = {x_tilde} rejected: Y0 undefined there")
        return y_tilde, math.inf, x_tilde
    if abs(y0 - y_tilde) < tol * (1.0 + abs(y_tilde)):
        return y_tilde, x_tilde, None
    logger.debug(f"x~1 = {x_tilde} rejected: Y0(x~1) = {y0} differs from y~0 = {y_tilde}")
    return y_tilde, math.inf, x_tilde


def pole_candidates(ks: KernelSystem, bp: BranchPoints, **search) -> PoleCandidates:
    """Both pole candidates for a walk, with provenance of each field."""
    consistency_tol = search.pop("consistency_tol", None)
    x_star = find_x_star(ks, bp, **search)
    y_tilde, x_tilde1, rejected = find_x_tilde(ks, bp, consistency_tol=consistency_tol, **search)
    return PoleCandidates(
        x_star=x_star,
        y_tilde=y_tilde,
        x_tilde1=x_tilde1,
        branch_point=bp.x3,
        rejected_x_tilde1=rejected,
        provenance={"x_star": "numeric_estimate", "x_tilde1": "numeric_estimate", "branch_point": "numeric_estimate"},
    )


def _relative_gap(a: float, b: float) -> float:
    if not (math.isfinite(a) and math.isfinite(b)):
        return 0.0 if a == b else math.inf
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > 0 else 0.0


def classify_candidates(
    x_star: float,
    x_tilde: float,
    branch_point: float,
    eps_eq: Optional[float] = None,
    labels: Tuple[str, str, str] = ("x*", "x~1", "x3"),
) -> CaseLabel:
    """Four-case rule shared by the walk and the SRBM.

    Case 1: min(x*, x~) < branch point with x* != x~, or x* = x~ = branch point.
    Case 2: min(x*, x~) = branch point, x* != x~.
    Case 3: branch point < min(x*, x~).
    Case 4: x* = x~ < branch point.
    """
    eps = eps_eq or Settings.EPS_EQ
    near = Settings.NEAR_DEGENERATE_FACTOR * eps
    pole = min(x_star, x_tilde)
    notes: List[str] = []
    near_degenerate = False
    names = dict(zip(("star", "tilde", "branch"), labels))
    for (u, nu), (v, nv) in (
        ((x_star, "star"), (x_tilde, "tilde")),
        ((x_star, "star"), (branch_point, "branch")),
        ((x_tilde, "tilde"), (branch_point, "branch")),
    ):
        gap = _relative_gap(u, v)
        if math.isfinite(u) and math.isfinite(v) and eps < gap <= near:
            near_degenerate = True
            notes.append(f"near-degenerate: {names[nu]} and {names[nv]} differ by {gap:.3g} (relative)")

    poles_equal = math.isfinite(pole) and _relative_gap(x_star, x_tilde) <= eps
    at_branch = math.isfinite(pole) and _relative_gap(pole, branch_point) <= eps

    if poles_equal and at_branch:
        case_id, x_dom, coincidence = 1, branch_point, True
        notes.append(f"{names['star']} = {names['tilde']} = {names['branch']}")
    elif poles_equal:
        case_id, x_dom, coincidence = (4, pole, False) if pole < branch_point else (3, branch_point, False)
        if case_id == 4:
            notes.append(f"double pole: {names['star']} = {names['tilde']}")
    elif at_branch:
        case_id, x_dom, coincidence = 2, branch_point, True
        notes.append(f"pole coincides with the branch point {names['branch']}")
    elif pole < branch_point:
        case_id, x_dom, coincidence = 1, pole, False
        if math.isfinite(x_star) and math.isfinite(x_tilde):
            notes.append(f"two distinct poles below {names['branch']}; the smaller dominates")
    else:
        case_id, x_dom, coincidence = 3, branch_point, False

    for note in notes:
        if note.startswith("near-degenerate"):
            logger.warning(note)
    return CaseLabel(case_id=case_id, x_dom=x_dom, coincidence=coincidence, near_degenerate=near_degenerate, notes=notes)


def classify(pc: PoleCandidates, eps_eq: Optional[float] = None) -> CaseLabel:
    """Case label and x_dom for walk pole candidates."""
    return classify_candidates(pc.x_star, pc.x_tilde1, pc.branch_point, eps_eq)


def _bivariate_expr(grid, x: sp.Symbol, y: sp.Symbol) -> sp.Expr:
    return sum(
        sp.Float(float(c)) * x ** k * y ** l for k, row in enumerate(grid) for l, c in enumerate(row) if c != 0
    )


def cross_check_x_star(ks: KernelSystem, bp: BranchPoints, x_star: Optional[float] = None) -> Dict[str, Any]:
    """Resultant-based check of x*: eliminate y between h and h1.

    Real roots of the resultant in (1, x3] where h1(x, Y0(x)) vanishes must
    reproduce the grid-search zero.
    """
    x_star = find_x_star(ks, bp) if x_star is None else x_star
    x, y = sp.symbols("x y")
    resultant = sp.resultant(_bivariate_expr(ks.h, x, y), _bivariate_expr(ks.h1, x, y), y)
    coeffs = [float(c) for c in reversed(sp.Poly(sp.expand(resultant), x).all_coeffs())]
    roots, _ = split_real_roots(polynomial_roots(poly_trim(coeffs, 1e-14)))
    branch = AnalyticBranch(ks, bp, "y")
    x3 = bp.x3
    on_y0: List[float] = []
    for r in roots:
        if not (1.0 + Settings.EPS_EQ < r <= x3 * (1.0 + Settings.EPS_EQ)):
            continue
        r = min(r, x3)
        y0 = branch.min_branch(np.array([r]))[0]
        scale = _endpoint_atol(ks.h1, r, abs(y0), 1.0)
        if abs(ks.h1_value(r, y0)) <= 1e-6 * scale:
            on_y0.append(r)
    expected = [x_star] if math.isfinite(x_star) else []
    agrees = len(on_y0) == len(expected) and all(
        abs(u - v) <= 1e-6 * max(1.0, abs(v)) for u, v in zip(sorted(on_y0), expected)
    )
    if not agrees:
        logger.warning(f"resultant cross-check disagrees: grid search {x_star}, resultant {on_y0}")
    return {
        "x_star": x_star,
        "resultant_degree": len(coeffs) - 1,
        "resultant_real_roots": roots,
        "roots_on_y0": on_y0,
        "agrees": agrees,
    }
