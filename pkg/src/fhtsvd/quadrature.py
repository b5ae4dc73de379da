"""Gauss-Legendre building blocks shared by every integral in the package.

Two rules are provided.  The plain rule on [0, pi] is used after the cosine
substitution, where integrands are analytic and converge geometrically.  The
graded composite rule refines geometrically toward the interval ends and is
used when an integrand keeps a logarithmic or near-singular factor there.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable

import numpy as np

MAX_ORDER = 1 << 15


class QuadratureError(RuntimeError):
    """Raised when order doubling fails to reach the requested tolerance."""


@lru_cache(maxsize=64)
def _legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_rule(n: int, lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point Gauss-Legendre rule on [lo, hi]."""
    x, w = _legendre(n)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


@lru_cache(maxsize=64)
def graded_breakpoints(levels: int, ratio: float) -> np.ndarray:
    """Panel breakpoints on [0, 1] refined geometrically toward both ends."""
    left = 0.5 * ratio ** np.arange(levels, 0, -1)
    pts = np.concatenate([[0.0], left, [0.5], 1.0 - left[::-1], [1.0]])
    pts.setflags(write=False)
    return pts


def graded_rule(n: int, lo: float, hi: float, levels: int = 14,
                ratio: float = 0.2) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss rule on [lo, hi] with panels shrinking toward both ends.

    Panel i spans a fraction ``ratio**k`` of the half-interval, so a log
    singularity at either end is integrated to roughly ``ratio**levels``.
    """
    pts = lo + (hi - lo) * graded_breakpoints(levels, ratio)
    x, w = _legendre(n)
    a, b = pts[:-1, None], pts[1:, None]
    half = 0.5 * (b - a)
    nodes = a + half * (x + 1.0)
    weights = half * w
    return nodes.ravel(), weights.ravel()


def converge(evaluate: Callable[[int], np.ndarray], order: int = 128,
             tol: float = 1e-11, max_order: int = MAX_ORDER,
             floor: float = 1e-300):
    """Double ``order`` until ``evaluate(order)`` changes by less than ``tol``.

    The change is measured relative to the largest entry of the result, with
    ``floor`` guarding the all-zero case.  Returns ``(value, order)``.
    """
    prev = np.asarray(evaluate(order))
    while order < max_order:
        order *= 2
        cur = np.asarray(evaluate(order))
        scale = max(np.max(np.abs(cur)), floor)
        if np.max(np.abs(cur - prev)) <= tol * scale:
            return cur, order
        prev = cur
    raise QuadratureError(f"no convergence to {tol:g} by order {max_order}")
