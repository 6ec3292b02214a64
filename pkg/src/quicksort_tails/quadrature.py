"""Gauss-Legendre panel quadrature with global adaptive bisection.

Shared by the special-function integrals and the log-space fixed-point
machinery. Integrands must be numpy-vectorized.
"""

from __future__ import annotations

import heapq
import math

import numpy as np
from numpy.polynomial.legendre import leggauss

_NODE_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


class QuadratureError(RuntimeError):
    """Requested tolerance not reached; carries the best value found."""

    def __init__(self, message, value=math.nan, error=math.inf):
        super().__init__(message)
        self.value = value
        self.error = error


def gl_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1], cached per order."""
    if order not in _NODE_CACHE:
        _NODE_CACHE[order] = leggauss(order)
    return _NODE_CACHE[order]


def gl_panel(f, a: float, b: float, order: int) -> float:
    x, w = gl_nodes(order)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    return half * float(np.dot(w, f(mid + half * x)))


def adaptive_gl(f, a: float, b: float, rel_tol: float = 1e-12,
                max_panels: int = 4000) -> tuple[float, float]:
    """Integrate a vectorized integrand over [a, b].

    Global strategy: keep a worst-first heap of panels, each carrying a
    16/32-point error estimate, and bisect until the summed error estimate
    is below rel_tol relative to the running total. Returns (value, error
    estimate); raises QuadratureError if the panel budget runs out.
    """
    if b < a:
        raise ValueError(f"inverted interval [{a}, {b}]")
    if b == a:
        return 0.0, 0.0

    def panel(lo, hi):
        coarse = gl_panel(f, lo, hi, 16)
        fine = gl_panel(f, lo, hi, 32)
        return abs(fine - coarse), lo, hi, fine

    heap = []
    err0, lo0, hi0, val0 = panel(a, b)
    counter = 0  # tie-breaker, heapq cannot compare floats that tie
    heapq.heappush(heap, (-err0, counter, lo0, hi0, val0))
    total = val0
    total_err = err0
    n_panels = 1
    while total_err > rel_tol * max(abs(total), 1e-300):
        if n_panels >= max_panels:
            raise QuadratureError(
                f"panel budget {max_panels} exhausted on [{a}, {b}]; "
                f"achieved relative error {total_err / max(abs(total), 1e-300):.3e}",
                value=total, error=total_err)
        neg_err, _, lo, hi, val = heapq.heappop(heap)
        total -= val
        total_err += neg_err  # neg_err is -err
        mid = 0.5 * (lo + hi)
        for seg in ((lo, mid), (mid, hi)):
            e, l, h, v = panel(*seg)
            counter += 1
            heapq.heappush(heap, (-e, counter, l, h, v))
            total += v
            total_err += e
        n_panels += 1
    return total, total_err


def logsumexp(values: np.ndarray) -> float:
    """ln sum exp of a 1-D array, tolerating -inf entries."""
    m = np.max(values)
    if not np.isfinite(m):
        return float(m)
    return float(m + np.log(np.sum(np.exp(values - m))))


def gl_log_panel(ln_f, a: float, b: float, order: int) -> float:
    """ln of the panel integral of exp(ln_f) over [a, b]."""
    x, w = gl_nodes(order)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    vals = ln_f(mid + half * x)
    return logsumexp(vals + np.log(w * half))
