"""Unique-zero search on a real interval: dense grid bracketing + Brent refinement.

Used for every pole search of the three pipelines, where the interval's left
end is a trivial zero and the right end is a branch point that may itself be
the zero (coincidence cases).
"""
from __future__ import annotations
from typing import Callable, List, Optional
import logging
import math

import numpy as np
from scipy.optimize import brentq

from config.settings import Settings
from utils.exceptions import MultipleZerosError

logger = logging.getLogger(__name__)

__all__ = ["find_unique_zero"]


def find_unique_zero(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    grid: Optional[int] = None,
    rtol: Optional[float] = None,
    endpoint_atol: float = 0.0,
    label: str = "f",
) -> float:
    """Return the unique zero of f in (lo, hi], or +inf when f keeps its sign.

    Args:
        f: vectorized real function on numpy arrays
        lo: open left end (excluded, typically a trivial zero)
        hi: closed right end
        grid: number of grid points (defaults to Settings.ZERO_SEARCH_GRID)
        rtol: relative bisection tolerance (defaults to Settings.BISECTION_RTOL)
        endpoint_atol: |f(hi)| at or below this counts as a zero at hi
        label: name used in logs and errors

    Raises:
        MultipleZerosError: more than one sign change on the grid
    """
    grid = grid or Settings.ZERO_SEARCH_GRID
    rtol = rtol or Settings.BISECTION_RTOL
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        return math.inf

    xs = lo + (hi - lo) * np.linspace(0.0, 1.0, grid + 1)[1:]
    xs[-1] = hi
    values = np.real(np.asarray(f(xs), dtype=complex))

    def scalar(x: float) -> float:
        return float(np.real(np.asarray(f(np.array([x])), dtype=complex))[0])

    zeros: List[float] = []
    endpoint_zero = math.isfinite(values[-1]) and abs(values[-1]) <= endpoint_atol
    if endpoint_zero:
        values[-1] = 0.0

    for k in range(len(xs) - 1):
        left, right = values[k], values[k + 1]
        if not (math.isfinite(left) and math.isfinite(right)):
            continue
        if left == 0.0:
            zeros.append(float(xs[k]))
        elif left * right < 0.0:
            root = brentq(scalar, xs[k], xs[k + 1], xtol=rtol * abs(xs[k + 1]), rtol=max(rtol, 1e-15))
            zeros.append(float(root))
    if values[-1] == 0.0:
        zeros.append(float(hi))

    distinct: List[float] = []
    for z in sorted(zeros):
        if not distinct or abs(z - distinct[-1]) > 1e3 * rtol * max(1.0, abs(z)):
            distinct.append(z)
    logger.debug(f"{label}: zeros on ({lo}, {hi}] -> {distinct}")

    if len(distinct) > 1:
        raise MultipleZerosError(
            f"{label} has {len(distinct)} zeros in ({lo}, {hi}]", zeros=distinct, interval=[lo, hi]
        )
    return distinct[0] if distinct else math.inf
