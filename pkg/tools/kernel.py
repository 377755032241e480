"""Kernel polynomials, branch points and the two analytic branches of a walk.

The kernel is h(x,y) = xy(sum p_{i,j} x^i y^j - 1) = a(x) y^2 + b(x) y + c(x).
Its roots in y, Y0 (minimum modulus) and Y1, are analytic on the plane cut
along [x1,x2] and [x3,x4]; the mirror roots X0, X1 live on the plane cut along
[y1,y2] and [y3,y4].
"""
from __future__ import annotations
from typing import Any, Dict, List, Optional, Sequence, Tuple
import logging
import math

import numpy as np
import numpy.polynomial.polynomial as P
import sympy as sp

from config.settings import Settings
from models.kernel_models import BranchPoints, KernelSystem
from models.spec_models import WalkSpec
from utils.exceptions import GenusZeroError, OnCutError, OrderingViolatedError, PoleOfBranchError, SingularKernelError
from utils.polynomials import has_repeated_root, poly_is_zero, poly_trim, polynomial_roots, split_real_roots

logger = logging.getLogger(__name__)

__all__ = [
    "kernel_coefficients",
    "build_kernel",
    "branch_points",
    "AnalyticBranch",
    "BranchPath",
    "eval_branch",
    "x_branches",
    "dump_kernel",
    "poly_expression",
]


def kernel_coefficients(spec: WalkSpec) -> List[List[float]]:
    """Coefficient grid C[k][l] of x^k y^l in h(x,y)."""
    C = [[0.0] * 3 for _ in range(3)]
    for i, j, p in spec.jumps("interior"):
        C[i + 1][j + 1] += p
    C[1][1] -= 1.0
    return C


def _boundary_grid(spec: WalkSpec, which: str, shape: Tuple[int, int], shift: Tuple[int, int], unit: Tuple[int, int]):
    grid = [[0.0] * shape[1] for _ in range(shape[0])]
    for i, j, p in spec.jumps(which):
        grid[i + shift[0]][j + shift[1]] += p
    grid[unit[0]][unit[1]] -= 1.0
    return grid


def build_kernel(spec: WalkSpec) -> KernelSystem:
    """Kernel and boundary polynomials h, h1, h2, h0 of a walk.

    Raises:
        SingularKernelError: h is not quadratic in x or in y
    """
    C = kernel_coefficients(spec)
    ks = KernelSystem(
        h=C,
        # x(sum p1 x^i y^j - 1)
        h1=_boundary_grid(spec, "hwall", (3, 2), (1, 0), (1, 0)),
        # y(sum p2 x^i y^j - 1)
        h2=_boundary_grid(spec, "vwall", (2, 3), (0, 1), (0, 1)),
        h0=_boundary_grid(spec, "origin", (2, 2), (0, 0), (0, 0)),
    )
    for name, coeffs in (("a", ks.a), ("c", ks.c), ("a~", ks.a_tilde), ("c~", ks.c_tilde)):
        if poly_is_zero(coeffs):
            raise SingularKernelError(f"Singular kernel: {name} vanishes identically", coefficient=name)
    return ks


def _order_roots(d: np.ndarray, drift: float, label: str) -> Tuple[Tuple[float, ...], Tuple[bool, ...], int, bool]:
    d = poly_trim(d, 1e-14)
    degree = d.size - 1
    if degree < 3:
        raise OrderingViolatedError(
            f"D{label} has degree {degree}; four (or three) branch points expected", degree=degree
        )
    roots = polynomial_roots(d)
    if has_repeated_root(d, roots):
        raise GenusZeroError(f"D{label} has a repeated root (genus 0)", roots=[complex(z) for z in roots])
    real, non_real = split_real_roots(roots)
    if non_real:
        raise OrderingViolatedError(
            f"D{label} has non-real roots", roots=[complex(z) for z in roots]
        )
    by_modulus = sorted(real, key=abs)
    if degree == 3:
        # cut [r3, +inf) when D is negative beyond r3, else through -inf
        by_modulus.append(math.inf if d[-1] < 0 else -math.inf)
    r1, r2, r3, r4 = by_modulus
    strict = abs(drift) > Settings.DRIFT_ZERO_TOL
    ordered = abs(r1) < r2 < 1.0 < r3 < abs(r4)
    if strict and not ordered:
        raise OrderingViolatedError(
            f"Branch points violate |{label}1| < {label}2 < 1 < {label}3 < |{label}4|",
            branch_points=[r1, r2, r3, r4],
            drift=drift,
        )
    return (r1, r2, r3, r4), (True, True, True, True), degree, strict and ordered


def branch_points(ks: KernelSystem) -> BranchPoints:
    """Real branch points in both directions, ordered |r1| < r2 < 1 < r3 < |r4|.

    The ordering is enforced when the drift component in the corresponding
    direction is nonzero (My for x-branch points, Mx for y-branch points).

    Raises:
        GenusZeroError: repeated root of a discriminant
        OrderingViolatedError: non-real roots or broken ordering
    """
    my = float(P.polyval(1.0, ks.a) - P.polyval(1.0, ks.c))
    mx = float(P.polyval(1.0, ks.a_tilde) - P.polyval(1.0, ks.c_tilde))
    x, x_simple, deg_x, x_checked = _order_roots(ks.d1, my, "x")
    y, y_simple, deg_y, y_checked = _order_roots(ks.d2, mx, "y")
    logger.debug(f"branch points x={x} y={y}")
    return BranchPoints(
        x=x, y=y, x_simple=x_simple, y_simple=y_simple,
        degree_x=deg_x, degree_y=deg_y, ordering_verified=x_checked and y_checked,
    )


class AnalyticBranch:
    """Evaluator for the two roots of the kernel in one direction.

    direction "y": Y0(x), Y1(x) on the x-plane cut along [x1,x2] and [x3,x4].
    direction "x": X0(y), X1(y) on the y-plane cut along [y1,y2] and [y3,y4].
    Y0 is the root of minimum modulus.
    """

    selection = "min-modulus"

    def __init__(self, ks: KernelSystem, bp: BranchPoints, direction: str = "y"):
        if direction == "y":
            self.a, self.b, self.c, self.d = ks.a, ks.b, ks.c, ks.d1
            points = bp.x
        elif direction == "x":
            self.a, self.b, self.c, self.d = ks.a_tilde, ks.b_tilde, ks.c_tilde, ks.d2
            points = bp.y
        else:
            raise ValueError(f"Unknown direction: {direction}")
        self.direction = direction
        self.branch_points = points
        self.cuts = self._cut_intervals(points)

    @staticmethod
    def _cut_intervals(points: Sequence[float]) -> List[Tuple[float, float]]:
        r1, r2, r3, r4 = points
        cuts = [(min(r1, r2), max(r1, r2))]
        if r4 > r3:
            cuts.append((r3, r4))
        else:
            # cut through infinity
            cuts.append((r3, math.inf))
            if math.isfinite(r4):
                cuts.append((-math.inf, r4))
        return cuts

    def describe_cuts(self) -> List[List[float]]:
        return [[lo, hi] for lo, hi in self.cuts]

    def _near_branch_point(self, x: np.ndarray) -> np.ndarray:
        mask = np.zeros(x.shape, dtype=bool)
        for r in self.branch_points:
            if math.isfinite(r):
                mask |= np.abs(x - r) <= Settings.CUT_DISTANCE_TOL * (1.0 + abs(r))
        return mask

    def on_cut(self, x) -> np.ndarray:
        """True where x lies strictly inside a cut (endpoints excluded)."""
        x = np.asarray(x, dtype=complex)
        tol = Settings.CUT_DISTANCE_TOL
        real_axis = np.abs(x.imag) <= tol * (1.0 + np.abs(x))
        inside = np.zeros(x.shape, dtype=bool)
        for lo, hi in self.cuts:
            inside |= (x.real > lo) & (x.real < hi)
        return real_axis & inside & ~self._near_branch_point(x)

    def roots(self, x, previous=None) -> Tuple[np.ndarray, np.ndarray]:
        """Vectorized (R0, R1) without cut checks; R1 = inf where the leading coefficient vanishes."""
        x = np.asarray(x, dtype=complex)
        a = P.polyval(x, self.a)
        b = P.polyval(x, self.b)
        c = P.polyval(x, self.c)
        s = np.sqrt(P.polyval(x, self.d).astype(complex))
        s = np.where(self._near_branch_point(x), 0.0, s)
        # q = -(b + sign * s)/2 with the sign avoiding cancellation
        sign = np.where(np.real(np.conj(b) * s) >= 0, 1.0, -1.0)
        q = -0.5 * (b + sign * s)
        with np.errstate(divide="ignore", invalid="ignore"):
            first = np.where(a != 0, q / a, np.inf)
            second = np.where(q != 0, c / q, np.where(a != 0, -b / (2 * a), np.inf))
        pole = a == 0
        if np.any(pole):
            # linear equation b y + c = 0
            with np.errstate(divide="ignore", invalid="ignore"):
                finite = -c / b
            first = np.where(pole, np.inf, first)
            second = np.where(pole, finite, second)
        swap = np.abs(first) < np.abs(second)
        r0 = np.where(swap, first, second)
        r1 = np.where(swap, second, first)
        tie = np.isclose(np.abs(first), np.abs(second), rtol=1e-15, atol=0.0) & (first != second) & np.isfinite(first)
        if np.any(tie):
            r0, r1 = self._break_ties(r0, r1, tie, previous)
        return r0, r1

    @staticmethod
    def _break_ties(r0, r1, tie, previous):
        r0, r1 = r0.copy(), r1.copy()
        for k in np.flatnonzero(tie):
            u, v = r0.flat[k], r1.flat[k]
            if previous is not None:
                keep = abs(u - previous) <= abs(v - previous)
            else:
                keep = (u.real, u.imag) <= (v.real, v.imag)
            if not keep:
                r0.flat[k], r1.flat[k] = v, u
        return r0, r1

    def evaluate(self, x, previous=None) -> Tuple[complex, complex]:
        """Scalar (R0, R1).

        Raises:
            OnCutError: x lies on a cut
            PoleOfBranchError: the leading coefficient vanishes at x
        """
        x = complex(x)
        if bool(self.on_cut(np.array([x]))[0]):
            raise OnCutError(f"{x} lies on a cut", point=x, cuts=self.describe_cuts())
        r0, r1 = self.roots(np.array([x]), previous)
        r0, r1 = complex(r0[0]), complex(r1[0])
        if math.isinf(abs(r1)):
            raise PoleOfBranchError(f"Leading coefficient vanishes at {x}", finite_root=r0, point=x)
        return r0, r1

    def min_branch(self, x) -> np.ndarray:
        """Vectorized R0 (real part for real arguments off the cuts)."""
        return self.roots(x)[0]

    def path(self) -> "BranchPath":
        return BranchPath(self)


class BranchPath:
    """Evaluation session that breaks modulus ties by continuity with the previous point."""

    def __init__(self, branch: AnalyticBranch):
        self.branch = branch
        self.previous: Optional[complex] = None

    def __enter__(self) -> "BranchPath":
        return self

    def __exit__(self, *exc) -> None:
        self.previous = None

    def evaluate(self, x) -> Tuple[complex, complex]:
        r0, r1 = self.branch.evaluate(x, self.previous)
        self.previous = r0
        return r0, r1


def eval_branch(ab: AnalyticBranch, x: complex) -> Tuple[complex, complex]:
    """(Y0(x), Y1(x)) for a y-direction branch."""
    return ab.evaluate(x)


def x_branches(ks: KernelSystem, y: complex, bp: Optional[BranchPoints] = None) -> Tuple[complex, complex]:
    """(X0(y), X1(y)), the mirror of eval_branch."""
    return AnalyticBranch(ks, bp or branch_points(ks), "x").evaluate(y)


def poly_expression(coeffs: Sequence[float], var: sp.Symbol) -> str:
    return str(sp.expand(sum(sp.Float(float(c)) * var ** k for k, c in enumerate(coeffs) if c != 0)))


def _expr_2d(grid: Sequence[Sequence[float]]) -> str:
    x, y = sp.symbols("x y")
    return str(sp.expand(sum(
        sp.Float(float(c)) * x ** k * y ** l for k, row in enumerate(grid) for l, c in enumerate(row) if c != 0
    )))


def dump_kernel(ks: KernelSystem, bp: Optional[BranchPoints] = None) -> Dict[str, Any]:
    """Diagnostic dump of all kernel polynomials and their roots."""
    x, y = sp.symbols("x y")
    polys = {
        "a": (ks.a, x), "b": (ks.b, x), "c": (ks.c, x), "D1": (ks.d1, x),
        "a_tilde": (ks.a_tilde, y), "b_tilde": (ks.b_tilde, y), "c_tilde": (ks.c_tilde, y), "D2": (ks.d2, y),
    }
    out: Dict[str, Any] = {
        name: {"coefficients": [float(c) for c in coeffs], "expression": poly_expression(coeffs, var)}
        for name, (coeffs, var) in polys.items()
    }
    for name in ("h", "h1", "h2", "h0"):
        grid = getattr(ks, name)
        out[name] = {"coefficients": [list(row) for row in grid], "expression": _expr_2d(grid)}
    for name in ("D1", "D2"):
        roots = polynomial_roots(poly_trim(out[name]["coefficients"], 1e-14))
        out[name]["roots"] = [complex(z) for z in roots]
    if bp is not None:
        out["branch_points"] = {"x": list(bp.x), "y": list(bp.y), "ordering_verified": bp.ordering_verified}
    return out
