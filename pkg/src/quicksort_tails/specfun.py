"""Scalar special functions and constants used across the package.

Covers harmonic numbers and the exact mean, the entropy-like splitting
functions g and phi, the exponential-integral-type function J (quadrature,
divergent series with optimal truncation, stable differences, log form),
the saddle-point abscissa w(x), the Chernoff-optimal abscissa solver, and
the dyadic series s(nu) behind the perfect-tree probability.

All operations are pure and reentrant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .quadrature import adaptive_gl

# Euler-Mascheroni constant as a 20-digit literal; never computed here.
EULER_GAMMA = 0.57721566490153286061

TWO_E = 2.0 * math.e

# J_quad overflows past this; callers are pointed at ln_J_quad.
_J_OVERFLOW_T = 709.0


class NoSolutionError(ValueError):
    """Root requested outside the range where a real solution exists."""

    def __init__(self, message, threshold=None):
        super().__init__(message)
        self.threshold = threshold


@dataclass(frozen=True)
class WSolve:
    """Solution w >= 1 of x = 2 e^w / w for a tail abscissa x >= 2e."""
    x: float
    w: float
    residual: float


@dataclass(frozen=True)
class TwSolve:
    """Larger positive root of x = 2(e^t/t - t) + a.

    ``gap`` is t - w(x) to full relative accuracy (solved directly in the
    gap variable when x >= 2e); downstream gain computations need it and
    cannot recover it from ``tw - w`` without catastrophic cancellation.
    """
    x: float
    a: float
    tw: float
    w: float | None
    gap: float | None
    residual: float


@dataclass(frozen=True)
class SeriesSum:
    """Partial sum of the divergent expansion of J with truncation info."""
    value: float
    ln_value: float
    terms_used: int
    last_term: float

    def __float__(self):
        return self.value


def harmonic(n: int, mode: str = "exact"):
    """n-th harmonic number; Fraction in exact mode, float otherwise."""
    if n < 1:
        raise ValueError(f"harmonic requires n >= 1, got {n}")
    if mode == "exact":
        total = Fraction(0)
        for k in range(1, n + 1):
            total += Fraction(1, k)
        return total
    if mode == "float":
        return math.fsum(1.0 / k for k in range(1, n + 1))
    raise ValueError(f"unknown mode {mode!r}")


def mu(n: int, mode: str = "exact"):
    """Exact mean comparison count, 2(n+1)H_n - 4n; mu(0) = 0."""
    if n < 0:
        raise ValueError(f"mu requires n >= 0, got {n}")
    if n == 0:
        return Fraction(0) if mode == "exact" else 0.0
    h = harmonic(n, mode)
    if mode == "exact":
        return 2 * (n + 1) * h - 4 * n
    return 2.0 * (n + 1) * h - 4.0 * n


def phi(u: float) -> float:
    """u ln u + (1-u) ln(1-u), extended continuously to [0, 1]."""
    if u < 0.0 or u > 1.0:
        raise ValueError(f"phi requires u in [0, 1], got {u}")
    if u == 0.0 or u == 1.0:
        return 0.0
    return u * math.log(u) + (1.0 - u) * math.log(1.0 - u)


def g(u: float) -> float:
    """Splitting cost 2 phi(u) + 1; symmetric about 1/2, at most 1."""
    return 2.0 * phi(u) + 1.0


def J_quad(t: float, rel_tol: float = 1e-12) -> float:
    """Integral of 2 e^s / s over [1, t] by adaptive Gauss-Legendre."""
    if t < 1.0:
        raise ValueError(f"J_quad requires t >= 1, got {t}")
    if t == 1.0:
        return 0.0
    if t > _J_OVERFLOW_T:
        raise OverflowError(
            f"J({t}) overflows a double; use ln_J_quad for t > {_J_OVERFLOW_T}")
    import numpy as np

    def f(s):
        return 2.0 * np.exp(s) / s

    value, _ = adaptive_gl(f, 1.0, t, rel_tol=rel_tol)
    return value


def J_diff(a: float, b: float, rel_tol: float = 1e-13) -> float:
    """J(b) - J(a) as a single integral; keeps small differences accurate."""
    if a < 1.0 or b < a:
        raise ValueError(f"J_diff requires 1 <= a <= b, got ({a}, {b})")
    if a == b:
        return 0.0
    if b > _J_OVERFLOW_T:
        raise OverflowError(f"J_diff endpoint {b} overflows a double")
    import numpy as np

    def f(s):
        return 2.0 * np.exp(s) / s

    value, _ = adaptive_gl(f, a, b, rel_tol=rel_tol)
    return value


def ln_J_quad(t: float, rel_tol: float = 1e-12) -> float:
    """ln J(t), stable for any t >= 1 (J itself overflows near t = 709).

    Uses the substitution s = t - v so the exponential factor e^t comes out
    exactly: ln J = t + ln of a bounded integral.
    """
    if t < 1.0:
        raise ValueError(f"ln_J_quad requires t >= 1, got {t}")
    if t == 1.0:
        return -math.inf
    import numpy as np

    def f(v):
        return 2.0 * np.exp(-v) / (t - v)

    hi = min(t - 1.0, 745.0)  # e^{-745} underflows; the tail is irrelevant
    value, _ = adaptive_gl(f, 0.0, hi, rel_tol=rel_tol)
    return t + math.log(value)


def J_series(t: float, terms="auto") -> SeriesSum:
    """Divergent expansion 2 t^{-1} e^t sum_j j! t^{-j}, optimally truncated.

    With terms="auto" the sum stops just before the first term that fails
    to decrease in magnitude (the classical smallest-term rule); an integer
    asks for exactly that many terms. The truncation index and the last
    included term are reported alongside the value.
    """
    if t < 2.0:
        raise ValueError(f"J_series requires t >= 2, got {t}")
    term = 1.0
    partial = 1.0
    used = 1
    if terms == "auto":
        j = 0
        while True:
            nxt = term * (j + 1) / t
            if nxt >= term:
                break
            term = nxt
            j += 1
            partial += term
            used += 1
            if used > 1000:
                break
    else:
        k = int(terms)
        if k < 1:
            raise ValueError("terms must be >= 1 or 'auto'")
        for j in range(1, k):
            term = term * j / t
            partial += term
        used = k
    ln_value = t - math.log(t) + math.log(2.0) + math.log(partial)
    value = math.exp(ln_value) if ln_value < 709.0 else math.inf
    return SeriesSum(value=value, ln_value=ln_value, terms_used=used,
                     last_term=term)


def solve_w(x: float) -> WSolve:
    """Unique w >= 1 with x = 2 e^w / w, for x >= 2e.

    Newton iteration on the log form w - ln w = ln(x/2), initialized from
    the two-term expansion ln(x/2) + ln ln(x/2) and safeguarded by
    bisection on [1, ln x + 2 ln ln x + 2].
    """
    if x < TWO_E:
        raise ValueError(f"solve_w requires x >= 2e = {TWO_E:.12f}, got {x}")
    target = math.log(x / 2.0)  # >= 1 on the domain
    if target <= 1.0:
        return WSolve(x=x, w=1.0, residual=abs(TWO_E - x))
    lo, hi = 1.0, math.log(x) + 2.0 * math.log(max(math.log(x), 1.01)) + 2.0
    w = target + math.log(target)
    w = min(max(w, lo), hi)
    for _ in range(100):
        fw = w - math.log(w) - target
        if fw > 0.0:
            hi = min(hi, w)
        else:
            lo = max(lo, w)
        dfw = 1.0 - 1.0 / w
        if dfw <= 0.0:
            w_new = 0.5 * (lo + hi)
        else:
            w_new = w - fw / dfw
            if not (lo <= w_new <= hi):
                w_new = 0.5 * (lo + hi)
        if abs(w_new - w) <= 1e-15 * w:
            w = w_new
            break
        w = w_new
    return WSolve(x=x, w=w, residual=abs(2.0 * math.exp(w) / w - x))


def _tw_curve(t: float, a: float) -> float:
    return 2.0 * (math.exp(t) / t - t) + a


# Minimizer of 2(e^t/t - t): root of e^t (t - 1) = t^2, cached lazily.
_T_STAR: float | None = None


def tw_minimizer() -> float:
    global _T_STAR
    if _T_STAR is None:
        t = 1.5
        for _ in range(60):
            f = math.exp(t) * (t - 1.0) - t * t
            df = math.exp(t) * t - 2.0 * t
            step = f / df
            t -= step
            if abs(step) < 1e-16 * t:
                break
        _T_STAR = t
    return _T_STAR


def tw_threshold(a: float = 0.0) -> float:
    """Smallest x for which x = 2(e^t/t - t) + a has two positive roots."""
    return _tw_curve(tw_minimizer(), a)


def solve_tw(x: float, a: float = 0.0) -> TwSolve:
    """Larger positive root of x = 2(e^t/t - t) + a.

    For x >= 2e the root is found by Newton in the gap variable d = t - w
    using w e^d - (w + d) = w expm1(d) - d, which keeps d fully accurate
    even when d is ~1e-9; below 2e (but above the two-root threshold) a
    safeguarded Newton on t itself is used and no gap is reported.
    """
    threshold = tw_threshold(a)
    if x <= threshold:
        raise NoSolutionError(
            f"x = {x} is at or below the two-solution threshold "
            f"{threshold:.12g} for a = {a}", threshold=threshold)
    if x >= TWO_E:
        w = solve_w(x).w

        # rho(d) = x (w expm1(d) - d)/(w + d) - 2(w + d) + a, root at t - w
        def rho_pair(d):
            if d > 700.0:  # expm1 overflow; rho is astronomically positive
                return math.inf, math.inf
            e = math.expm1(d)
            num = w * e - d
            val = x * num / (w + d) - 2.0 * (w + d) + a
            der = x * ((w * (e + 1.0) - 1.0) * (w + d) - num) / (w + d) ** 2 \
                - 2.0
            return val, der

        lo = tw_minimizer() - w  # the larger root is right of the minimizer
        hi = max(2.0 * w * max(w - 0.5 * a, 1e-3) / (x * max(w - 1.0, 1e-3)),
                 1e-3)
        hi = min(hi, 10.0)
        while rho_pair(hi)[0] <= 0.0:
            hi *= 2.0
        d = hi  # rho is convex: Newton from the positive side is monotone
        for _ in range(200):
            rho, drho = rho_pair(d)
            if rho > 0.0:
                hi = min(hi, d)
            else:
                lo = max(lo, d)
            d_new = d - rho / drho if drho > 0.0 else 0.5 * (lo + hi)
            if not (lo < d_new < hi):
                d_new = 0.5 * (lo + hi)
            if abs(d_new - d) <= 1e-16 * max(abs(d), 1e-300):
                d = d_new
                break
            d = d_new
        tw = w + d
        return TwSolve(x=x, a=a, tw=tw, w=w, gap=d,
                       residual=abs(_tw_curve(tw, a) - x))
    # moderate x: bracket the larger root to the right of the minimizer
    t_lo = tw_minimizer()
    t_hi = t_lo + 1.0
    while _tw_curve(t_hi, a) < x:
        t_hi += 1.0
    t = 0.5 * (t_lo + t_hi)
    for _ in range(200):
        f = _tw_curve(t, a) - x
        if f > 0.0:
            t_hi = t
        else:
            t_lo = t
        df = 2.0 * (math.exp(t) * (t - 1.0) / (t * t) - 1.0)
        t_new = t - f / df if df != 0.0 else 0.5 * (t_lo + t_hi)
        if not (t_lo < t_new < t_hi):
            t_new = 0.5 * (t_lo + t_hi)
        if abs(t_new - t) <= 1e-16 * t:
            t = t_new
            break
        t = t_new
    return TwSolve(x=x, a=a, tw=t, w=None, gap=None,
                   residual=abs(_tw_curve(t, a) - x))


def s_series(nu: float, tol: float = 1e-9) -> float:
    """Dyadic series sum_j 2^{-j} ln(2^j nu - 1) for nu >= 1.

    Terms behave like 2^{-j}(j ln 2 + ln nu), so a geometric tail bound
    decides truncation: stop once the bound drops below tol times the
    partial sum.
    """
    if nu < 1.0:
        raise ValueError(f"s_series requires nu >= 1, got {nu}")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    total = 0.0
    log_nu = math.log(nu)
    for j in range(1, 400):
        total += math.ldexp(math.log(math.ldexp(nu, j) - 1.0), -j)
        # sum_{i>j} 2^{-i}(i ln 2 + ln nu) = 2^{-j}((j+2) ln 2 + ln nu)
        tail = math.ldexp((j + 2) * math.log(2.0) + max(log_nu, 0.0), -j)
        if total > 0.0 and tail < tol * total:
            break
    return total


@dataclass(frozen=True)
class Constants:
    """Named constants: limiting variance, linear-term constant alpha,
    left-tail rate, and s(1)."""
    var_z: float
    alpha: float
    gamma_cap: float
    s1: float


CONSTANTS = Constants(
    var_z=7.0 - 2.0 * math.pi ** 2 / 3.0,
    alpha=2.0 * math.log(2.0) + 2.0 * EULER_GAMMA - 1.0,
    gamma_cap=1.0 / (2.0 - 1.0 / math.log(2.0)),
    s1=s_series(1.0, tol=1e-14),
)
