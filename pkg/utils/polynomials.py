"""Univariate polynomial helpers on ascending coefficient arrays.

Roots come from companion-matrix eigenvalues followed by Newton polishing.
"""
from __future__ import annotations
from typing import List, Sequence, Tuple
import logging

import numpy as np
import numpy.polynomial.polynomial as poly

from config.settings import Settings

logger = logging.getLogger(__name__)

__all__ = [
    "poly_trim",
    "poly_is_zero",
    "polish_root",
    "polynomial_roots",
    "split_real_roots",
    "has_repeated_root",
    "is_perfect_square",
    "have_common_root",
]


def poly_trim(p: Sequence[float], tol: float = 0.0) -> np.ndarray:
    """Drop high-order coefficients with modulus <= tol * max|p|."""
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0:
        return np.zeros(1)
    cutoff = tol * float(np.max(np.abs(p))) if tol > 0 else 0.0
    k = p.size - 1
    while k > 0 and abs(p[k]) <= cutoff:
        k -= 1
    return p[:k + 1].copy()


def poly_is_zero(p: Sequence[float]) -> bool:
    return not np.any(np.asarray(p, dtype=float))


def polish_root(p: np.ndarray, root: complex, steps: int) -> complex:
    """Newton steps on p, keeping the iterate only while |p| decreases."""
    dp = poly.polyder(p)
    z = complex(root)
    value = abs(poly.polyval(z, p))
    for _ in range(steps):
        slope = poly.polyval(z, dp)
        if slope == 0:
            break
        candidate = z - poly.polyval(z, p) / slope
        candidate_value = abs(poly.polyval(candidate, p))
        if candidate_value > value:
            break
        z, value = candidate, candidate_value
    return z


def polynomial_roots(p: Sequence[float], polish_steps: int = None) -> np.ndarray:
    """All complex roots of p (ascending coefficients, already trimmed)."""
    p = poly_trim(p)
    if p.size < 2:
        return np.zeros(0, dtype=complex)
    steps = Settings.NEWTON_POLISH_STEPS if polish_steps is None else polish_steps
    if p.size == 2:
        raw = np.array([-p[0] / p[1]], dtype=complex)
    else:
        raw = np.linalg.eigvals(poly.polycompanion(p)).astype(complex)
    roots = np.array([polish_root(p, z, steps) for z in raw], dtype=complex)
    logger.debug(f"roots of degree-{p.size - 1} polynomial: {roots}")
    return roots


def split_real_roots(roots: np.ndarray, imag_tol: float = None) -> Tuple[List[float], List[complex]]:
    """Separate roots with |Im| < imag_tol * (1 + |root|) from the genuinely complex ones."""
    tol = Settings.ROOT_IMAG_TOL if imag_tol is None else imag_tol
    real, complex_ = [], []
    for z in roots:
        if abs(z.imag) < tol * (1.0 + abs(z)):
            real.append(float(z.real))
        else:
            complex_.append(complex(z))
    return sorted(real), complex_


def _near_pairs(roots: np.ndarray, rel: float) -> List[Tuple[int, int]]:
    pairs = []
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            scale = max(1.0, abs(roots[i]), abs(roots[j]))
            if abs(roots[i] - roots[j]) < rel * scale:
                pairs.append((i, j))
    return pairs


def has_repeated_root(p: Sequence[float], roots: np.ndarray = None, sep_tol: float = None) -> bool:
    """True when two roots are closer than sep_tol (relative), or a close pair
    sits on a vanishing derivative (a numerically split double root)."""
    p = poly_trim(p)
    roots = polynomial_roots(p) if roots is None else roots
    tol = Settings.GENUS_SEPARATION_TOL if sep_tol is None else sep_tol
    if _near_pairs(roots, tol):
        return True
    dp = poly.polyder(p)
    for i, j in _near_pairs(roots, 1e-5):
        mid = 0.5 * (roots[i] + roots[j])
        scale = float(np.sum(np.abs(p))) * max(1.0, abs(mid)) ** (p.size - 1)
        if abs(poly.polyval(mid, dp)) < 1e-6 * scale:
            return True
    return False


def is_perfect_square(p: Sequence[float], tol: float = None) -> bool:
    """True when p = q^2 for a real polynomial q (even degree, positive lead).

    q is built from the leading coefficients downwards and the remaining
    coefficients of q^2 are compared with p.
    """
    tol = Settings.IRREDUCIBILITY_TOL if tol is None else tol
    p = poly_trim(p, tol)
    degree = p.size - 1
    scale = float(np.max(np.abs(p)))
    if degree % 2 or p[-1] <= 0:
        return False
    k = degree // 2
    q = np.zeros(k + 1)
    q[k] = np.sqrt(p[-1])
    for m in range(1, k + 1):
        # coefficient of x^(degree - m) in q^2
        partial = sum(q[k - i] * q[k - m + i] for i in range(1, m))
        q[k - m] = (p[degree - m] - partial) / (2.0 * q[k])
    square = poly.polymul(q, q)
    return bool(np.max(np.abs(square - p)) <= np.sqrt(tol) * scale)


def have_common_root(polys: Sequence[Sequence[float]], tol: float = None) -> bool:
    """True when all nonzero polynomials share a root (relative residual <= tol)."""
    tol = Settings.IRREDUCIBILITY_TOL if tol is None else tol
    nonzero = [poly_trim(p) for p in polys if not poly_is_zero(p)]
    if len(nonzero) < 2:
        return False
    candidates = polynomial_roots(min(nonzero, key=len))
    for z in candidates:
        if all(
            abs(poly.polyval(z, p)) <= tol * float(np.sum(np.abs(p))) * max(1.0, abs(z)) ** (p.size - 1)
            for p in nonzero
        ):
            return True
    return False
