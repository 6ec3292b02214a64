"""Closed-form tail and MGF bound exponents, in natural log.

Every bound carries its unspecified constants as explicit caller-supplied
slacks; nothing here pretends to know them. The sharp upper exponent is
the literal composition -x w(x) + J(w) - w^2 (+ a ln x); the Chernoff
gain of re-optimizing the abscissa is evaluated without cancellation via
the gap solver in specfun.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .quadrature import gl_nodes
from .specfun import CONSTANTS, J_quad, TWO_E, solve_tw, solve_w

_LN_2SQRTPI = math.log(2.0 * math.sqrt(math.pi))


def chernoff(x: float, t: float, ln_psi_at: float) -> float:
    """Markov/Chernoff exponent: ln of e^{-tx} psi(t)."""
    if t <= 0.0:
        raise ValueError(f"chernoff requires t > 0, got {t}")
    return -t * x + ln_psi_at


def new_upper_F(x: float, a: float = 0.0) -> float:
    """Sharp survival-function exponent -x w + J(w) - w^2 + a ln x."""
    ws = solve_w(x)
    base = chernoff(x, ws.w, J_quad(ws.w) - ws.w * ws.w)
    return base + a * math.log(x)


def new_upper_Fk(x: float, k: int = 1, c: float = 0.0) -> float:
    """Derivative-tail exponent -x w + J(w) + c sqrt(x ln x), any order k >= 1.

    The exponent does not depend on k (the inductive step absorbs each
    order into the sqrt term); k is validated and recorded by callers.
    """
    if k < 1:
        raise ValueError(f"new_upper_Fk requires k >= 1, got {k}")
    ws = solve_w(x)
    return -x * ws.w + J_quad(ws.w) + c * math.sqrt(x * math.log(x))


@dataclass(frozen=True)
class XaExponents:
    upper: float
    lower: float


def xa_exponents(x: float, c_lower: float = 0.0) -> XaExponents:
    """Three-log-term exponents: upper with the pinned (1 + ln 2) x linear
    term, lower with a caller linear constant."""
    if x <= math.e:
        raise ValueError(f"xa_exponents requires x > e, got {x}")
    lead = -x * math.log(x) - x * math.log(math.log(x))
    return XaExponents(upper=lead + (1.0 + math.log(2.0)) * x,
                       lower=lead + c_lower * x)


def janson_exponent(x: float) -> float:
    """Lead-order survival exponent -x ln x."""
    if x < 1.0:
        raise ValueError(f"janson_exponent requires x >= 1, got {x}")
    return -x * math.log(x)


@dataclass(frozen=True)
class KsConjecture:
    ln_fbar: float
    ln_density: float


def ks_conjecture(x: float, C: float = 0.0) -> KsConjecture:
    """Saddle-point survival/density exponents with unspecified constant C.

    Evaluators for comparison plots only; the underlying asymptotics are
    non-rigorous and are never asserted as truth here.
    """
    if x < TWO_E:
        raise ValueError(f"ks_conjecture requires x >= 2e, got {x}")
    ws = solve_w(x)
    w = ws.w
    core = -x * w + J_quad(w) - w * w
    ln_fbar = core - (CONSTANTS.alpha + 0.5) * w - 1.5 * math.log(w) \
        + C - _LN_2SQRTPI
    ln_density = -0.5 * math.log(2.0 * math.pi * x) + core \
        - CONSTANTS.alpha * w - math.log(w) + C
    return KsConjecture(ln_fbar=ln_fbar, ln_density=ln_density)


def ks_conjecture_psi(t: float, C: float = 0.0) -> float:
    """Conjectured ln psi(t) = J(t) - t^2 - alpha t - ln t + C."""
    if t < 1.0:
        raise ValueError(f"ks_conjecture_psi requires t >= 1, got {t}")
    return J_quad(t) - t * t - CONSTANTS.alpha * t - math.log(t) + C


def delta_gain(x: float, a: float = 0.0) -> float:
    """Exponent gain from the optimal Chernoff abscissa over w(x).

    Evaluates x d - [J(w + d) - J(w)] + (2w + d) d - a d with d the gap
    from the abscissa solver. The first difference is the integral of
    x - 2 e^s / s over [w, w + d], whose integrand is written in the
    cancellation-free expm1 form, so the result is accurate even though
    it is ~(ln x)^2 / x while the raw terms are ~ln x.
    """
    ts = solve_tw(x, a)
    if ts.gap is None:
        raise ValueError(f"delta_gain needs x >= 2e, got {x}")
    w, d = ts.w, ts.gap
    xg, wg = gl_nodes(32)
    v = 0.5 + 0.5 * xg  # nodes on [0, 1]
    dv = d * v
    integrand = x * (w * np.expm1(dv) - dv) / (w + dv)
    xd_minus_jdiff = -d * 0.5 * float(np.dot(wg, integrand))
    return xd_minus_jdiff + (2.0 * w + d) * d - a * d


@dataclass(frozen=True)
class LeftTail:
    """ln of the doubly exponential left-tail bounds (may be -inf when the
    inner exponent overflows a double; the bound itself underflows to 0)."""
    ln_upper: float
    ln_lower: float


def left_tail(x: float, k: int = 0, c_upper: float = 0.0,
              c_lower: float = 0.0) -> LeftTail:
    """Left-tail exponents -e^{Gamma x + c} (upper) and
    -e^{Gamma x + ln ln x + c} (lower); same shape for every order k."""
    if x < math.e:
        raise ValueError(f"left_tail requires x >= e, got {x}")
    if k < 0:
        raise ValueError(f"left_tail requires k >= 0, got {k}")
    gx = CONSTANTS.gamma_cap * x

    def neg_exp(arg):
        return -math.inf if arg > 709.0 else -math.exp(arg)

    return LeftTail(
        ln_upper=neg_exp(gx + c_upper),
        ln_lower=neg_exp(gx + math.log(math.log(x)) + c_lower),
    )


@dataclass(frozen=True)
class BoundReport:
    """Every exponent this module knows how to evaluate at one abscissa.

    Exponents whose domain excludes x are None. slacks records the
    caller-supplied constants that entered.
    """
    x: float
    exponents: dict
    slacks: dict

    def to_dict(self) -> dict:
        return {"x": self.x, "exponents": dict(self.exponents),
                "slacks": dict(self.slacks)}


def build_report(x: float, a: float = 0.0, c: float = 0.0, C: float = 0.0,
                 k: int = 1, c_lower: float = 0.0, c_upper: float = 0.0) -> BoundReport:
    exps: dict = {}
    exps["janson"] = janson_exponent(x) if x >= 1.0 else None
    if x > math.e:
        xa = xa_exponents(x, c_lower=C)
        exps["xaUpper"] = xa.upper
        exps["xaLower"] = xa.lower
    else:
        exps["xaUpper"] = exps["xaLower"] = None
    if x >= TWO_E:
        exps["newUpperF"] = new_upper_F(x, a)
        exps["newUpperFk"] = new_upper_Fk(x, k, c)
        kc = ks_conjecture(x, C)
        exps["ksConjF"] = kc.ln_fbar
        exps["ksConjDensity"] = kc.ln_density
    else:
        exps["newUpperF"] = exps["newUpperFk"] = None
        exps["ksConjF"] = exps["ksConjDensity"] = None
    if x >= math.e:
        lt = left_tail(x, k=0, c_upper=c_upper, c_lower=c_lower)
        exps["leftUpper"] = lt.ln_upper
        exps["leftLower"] = lt.ln_lower
    else:
        exps["leftUpper"] = exps["leftLower"] = None
    slacks = {"a": a, "c": c, "C": C, "k": k,
              "cLower": c_lower, "cUpper": c_upper}
    return BoundReport(x=x, exponents=exps, slacks=slacks)


def upper_crossover(lo: float = TWO_E, hi: float = 1e6, points: int = 400) -> float:
    """Smallest abscissa past which the sharp exponent stays at or below
    the three-term upper exponent (zero slacks), located on a log grid of
    [lo, hi] plus bisection; lo itself if the ordering never flips."""
    lo = max(lo, TWO_E)
    xs = np.exp(np.linspace(math.log(lo), math.log(hi), points))
    xs[0] = lo  # exp(log()) rounding must not dip below the solve_w domain
    diffs = [new_upper_F(float(v)) - xa_exponents(float(v)).upper for v in xs]
    last_pos = None
    for i, dv in enumerate(diffs):
        if dv > 0.0:
            last_pos = i
    if last_pos is None:
        return float(lo)
    if last_pos == len(xs) - 1:
        raise ValueError("no crossover at or below hi")
    a, b = float(xs[last_pos]), float(xs[last_pos + 1])
    for _ in range(80):
        m = 0.5 * (a + b)
        if new_upper_F(m) - xa_exponents(m).upper > 0.0:
            a = m
        else:
            b = m
    return b


def janson_vs_xa_crossover() -> float:
    """Abscissa where the lead-order exponent overtakes the three-term
    upper form: ln ln x = 1 + ln 2."""
    return math.exp(math.exp(1.0 + math.log(2.0)))


def reports_to_json(reports, extra=None) -> str:
    payload = {"schemaVersion": 1, "rows": [r.to_dict() for r in reports]}
    if extra:
        payload.update(extra)
    return json.dumps(payload, indent=2, sort_keys=True)
