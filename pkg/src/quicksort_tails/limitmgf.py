"""Numerics for the limiting moment generating function psi.

Two pieces of machinery live here:

* ``fixpoint_psi`` solves the defining integral equation
      psi(t) = 2 int_0^{1/2} psi(ut) psi((1-u)t) e^{t g(u)} du
  for ln psi on a grid, seeded with the mean-zero Gaussian of the true
  limiting variance. The equation is triangular in t: the right side only
  reads arguments strictly below t, so off-grid values are defined by
  monotone cubic interpolation of the table restricted to grid points at
  or below the point being evaluated (the causal convention; a full-table
  interpolant would make each value depend on its right neighbor through
  the local slope, and simultaneous sweeps would then need on the order
  of e^T of them, since information crosses the u ~ e^{-t} boundary layer
  only once per sweep). A sweep updates grid points in ascending order,
  solving the scalar self-consistency at each point; the reported
  residual is one more application of the same map against the frozen
  table, so a converged table is a fixed point of the map itself.

* ``lambda_ratio`` evaluates the comparison-function contraction integral
      lambda(t) = 2 int_0^{1/2} hpsi(ut) hpsi((1-u)t) e^{t g(u)} du
  as a ratio to hpsi(t), entirely in log space, in the boundary-layer
  variable eta = 2 u e^t. Differences J(t - delta) - J(t) are integrated
  directly (never formed by subtraction) so the ratio is meaningful at
  relative tolerances down to ~1e-11.

Everything overflows immediately in linear space (ln psi(12) is ~3e4), so
all arithmetic is on logarithms with log-sum-exp panel quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator

from .quadrature import QuadratureError, gl_nodes, logsumexp
from .specfun import CONSTANTS, J_quad

_SIGNS = {"minus": -1.0, "plus": +1.0}


def lnhpsi(t: float, variant: str = "minus") -> float:
    """ln of the comparison function (1 -+ e^{-t/2}) exp[J - t^2 - alpha t - ln t].

    Value 0 for t <= 1 (the function is defined as 1 there). The minus
    variant is the contraction witness; the plus variant reverses the
    inequality.
    """
    sign = _SIGNS[variant]
    if t <= 1.0:
        return 0.0
    return (math.log1p(sign * math.exp(-0.5 * t)) + J_quad(t)
            - t * t - CONSTANTS.alpha * t - math.log(t))


def _J_drop(t: float, deltas: np.ndarray) -> np.ndarray:
    """J(t) - J(t - delta) for an array of deltas in [0, t/2].

    Cumulative Gauss-Legendre over the sorted deltas: each value is a sum
    of small segment integrals, so tiny drops keep full relative accuracy
    instead of cancelling in J(t) - J(t - delta).
    """
    order = np.argsort(deltas)
    edges = np.concatenate([[0.0], deltas[order]])
    hi = t - edges[:-1]
    lo = t - edges[1:]
    xg, wg = gl_nodes(16)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    s = mid[:, None] + half[:, None] * xg[None, :]
    seg = np.sum(half[:, None] * wg[None, :] * 2.0 * np.exp(s) / s, axis=1)
    out = np.empty_like(deltas)
    out[order] = np.cumsum(seg)
    return out


def _ln_ratio_integrand(t: float, sign: float, etas: np.ndarray) -> np.ndarray:
    """ln[ hpsi(ut) hpsi((1-u)t) e^{t g(u)} / hpsi(t) ] at u = eta e^{-t}/2.

    Written so every term is a stable small difference; the leading
    behavior is -eta.
    """
    u = 0.5 * np.exp(-t) * etas
    delta = t * u  # both t - t1 and the first hpsi argument
    t1 = t - delta
    with np.errstate(divide="ignore", invalid="ignore"):
        phi_u = np.where(u > 0.0,
                         u * np.log(u) + (1.0 - u) * np.log1p(-u), 0.0)
    # e^{t} from g(u) = 2 phi(u) + 1 cancels the e^{-t} of du -> deta,
    # leaving 2 t phi(u)
    val = 2.0 * t * phi_u
    val += delta * (2.0 * t - delta)          # t^2 - t1^2
    val += CONSTANTS.alpha * delta            # alpha (t - t1)
    val -= np.log1p(-delta / t)               # ln t - ln t1
    val += np.log1p(sign * np.exp(-0.5 * t1)) - math.log1p(sign * math.exp(-0.5 * t))
    val -= _J_drop(t, delta)                  # J(t1) - J(t)
    big = delta > 1.0  # first factor leaves its flat unit piece
    if np.any(big):
        dv = delta[big]
        extra = np.log1p(sign * np.exp(-0.5 * dv)) - dv * dv \
            - CONSTANTS.alpha * dv - np.log(dv)
        extra += np.array([J_quad(float(d)) for d in dv])
        val[big] += extra
    return val


def _panel_log_pair(t, sign, lo, hi):
    """(order-24, order-48) log-integrals of the ratio integrand on [lo, hi]."""
    out = []
    for order in (24, 48):
        xg, wg = gl_nodes(order)
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        vals = _ln_ratio_integrand(t, sign, mid + half * xg)
        out.append(logsumexp(vals + np.log(wg * half)))
    return out


def lambda_ratio(t: float, rel_tol: float = 1e-9, variant: str = "minus") -> float:
    """lambda(t) / hpsi(t) by adaptive log-space quadrature in eta.

    The eta range [0, e^t] is seeded with doubling panels plus explicit
    boundaries at e^{t/10} (separating the unit-scale bulk from the far
    range) and at 2 e^t / t (where the first factor leaves its flat unit
    piece); the worst panel by the
    24/48-point discrepancy is bisected until the estimated relative
    error is below rel_tol. Raises QuadratureError (with the achieved
    error attached) if the panel budget cannot reach rel_tol.
    """
    if t < 3.0:
        raise ValueError(f"lambda_ratio requires t >= 3, got {t}")
    sign = _SIGNS[variant]
    top = math.exp(t)
    edges = {0.0, 1.0, top, min(math.exp(t / 10.0), top), min(2.0 * top / t, top)}
    e = 1.0
    while e < top:
        e = min(e * 2.0, top)
        edges.add(e)
    edges = sorted(edges)
    panels = [[lo, hi, *_panel_log_pair(t, sign, lo, hi)]
              for lo, hi in zip(edges[:-1], edges[1:])]
    for _ in range(400):
        ln_tot = logsumexp(np.array([p[3] for p in panels]))
        errs = [abs(math.exp(p[3] - ln_tot) - math.exp(p[2] - ln_tot))
                if min(p[2], p[3]) - ln_tot > -745.0 else 0.0
                for p in panels]
        if sum(errs) <= rel_tol:
            return math.exp(ln_tot)
        worst = max(range(len(panels)), key=lambda i: errs[i])
        lo, hi = panels[worst][0], panels[worst][1]
        mid = 0.5 * (lo + hi)
        panels[worst:worst + 1] = [[lo, mid, *_panel_log_pair(t, sign, lo, mid)],
                                   [mid, hi, *_panel_log_pair(t, sign, mid, hi)]]
    achieved = sum(errs)
    raise QuadratureError(
        f"lambda_ratio({t}) did not reach rel_tol {rel_tol}; achieved {achieved:.3e}",
        value=math.exp(ln_tot), error=achieved)


@dataclass(frozen=True)
class MgfTable:
    """Grid of ln psi values from the fixed-point solve."""
    grid: np.ndarray
    ln_psi: np.ndarray
    iterations: int
    residual: float
    converged: bool
    tol: float

    def interpolator(self) -> PchipInterpolator:
        return PchipInterpolator(self.grid, self.ln_psi)


def _causal_interp(x: np.ndarray, y: np.ndarray):
    """Monotone cubic interpolant of ln psi with the mean-zero gauge pinned.

    The integral map is neutral along psi -> psi e^{ct} (any tilt of a
    fixed point is again a fixed point); what selects the limiting law is
    E Z = 0, i.e. (ln psi)'(0) = 0. Interpolating with shape-preserving
    slopes but the left-endpoint derivative forced to zero imposes that
    constraint; without it the per-point equations are singular along the
    tilt direction (exactly so when only two nodes are visible).
    """
    slopes = PchipInterpolator(x, y).derivative()(x)
    slopes[0] = 0.0
    return CubicHermiteSpline(x, y, slopes)


def _ln_map(t: float, itp) -> float:
    """One application of the log-space integral map at t.

    Geometric panels in u from 1/2 down to 0.5 e^{-t-45} resolve the
    e^{-t} boundary layer; one log-sum-exp accumulates all panel nodes.
    The remaining sliver [0, floor] is flat at the u -> 0 limit value.
    """
    if t <= 0.0:
        return 0.0
    n_pan = int(math.ceil((t + 45.0) / math.log(2.0)))
    edges = 0.5 * np.exp2(-np.arange(n_pan + 1, dtype=float))
    his, los = edges[:-1], edges[1:]
    xg, wg = gl_nodes(16)
    half = 0.5 * (his - los)
    mid = 0.5 * (his + los)
    u = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    ln_w = np.log(np.outer(half, wg)).ravel()
    ln_f = itp(u * t) + itp((1.0 - u) * t) \
        + t * (2.0 * (u * np.log(u) + (1.0 - u) * np.log1p(-u)) + 1.0)
    sliver = math.log(los[-1]) + float(itp(t)) + t
    return math.log(2.0) + logsumexp(np.append(ln_f + ln_w, sliver))


def _solve_point(grid, values, i) -> float:
    """Value b at grid[i] with b = ln map of the causal table patched with b."""
    t = grid[i]

    def G(b):
        patched = values[:i + 1].copy()
        patched[i] = b
        return _ln_map(t, _causal_interp(grid[:i + 1], patched)) - b

    b0 = values[i]
    g0 = G(b0)
    if g0 == 0.0:
        return b0
    b1 = b0 + g0  # fixed-point step as the second secant seed
    g1 = G(b1)
    lo_b, lo_g = (b0, g0) if g0 > 0 else (None, None)
    hi_b, hi_g = (b0, g0) if g0 < 0 else (None, None)
    for _ in range(40):
        if g1 > 0 and (lo_b is None or b1 > lo_b):
            lo_b, lo_g = b1, g1
        if g1 < 0 and (hi_b is None or b1 < hi_b):
            hi_b, hi_g = b1, g1
        if g1 == g0:
            break
        b2 = b1 - g1 * (b1 - b0) / (g1 - g0)
        if lo_b is not None and hi_b is not None and not (lo_b < b2 < hi_b):
            b2 = 0.5 * (lo_b + hi_b)  # G is decreasing: root is bracketed
        if abs(b2 - b1) <= 1e-12 * max(1.0, abs(b1)):
            return b2
        b0, g0 = b1, g1
        b1 = b2
        g1 = G(b1)
    return b1


def fixpoint_psi(t_max: float = 12.0, grid_size: int = 256, tol: float = 1e-9,
                 max_iter: int = 60) -> MgfTable:
    """Solve the integral equation for ln psi on [0, t_max].

    Start from the Gaussian seed ln psi_0(t) = var_Z t^2 / 2, sweep grid
    points in ascending t (each solved self-consistently against the
    current table), stop when a full sweep moves no point by tol. The
    residual of one simultaneous map application is reported either way;
    a non-converged table is still returned, flagged.
    """
    if t_max > 15.0:
        raise ValueError("t_max above 15 is outside the supported range")
    if grid_size < 16:
        raise ValueError("grid_size must be at least 16")
    grid = np.linspace(0.0, t_max, grid_size)
    values = 0.5 * CONSTANTS.var_z * grid ** 2
    iterations = 0
    converged = False
    while iterations < max_iter:
        prev = values.copy()
        for i in range(1, grid_size):
            values[i] = _solve_point(grid, values, i)
        iterations += 1
        if float(np.max(np.abs(values - prev))) < tol:
            converged = True
            break
    residual = max(
        abs(_ln_map(float(grid[i]),
                    _causal_interp(grid[:i + 1], values[:i + 1])) - values[i])
        for i in range(1, grid_size))
    values.setflags(write=False)
    return MgfTable(grid=grid, ln_psi=values, iterations=iterations,
                    residual=residual, converged=converged, tol=tol)


def fit_slack(table: MgfTable, t_min: float = 1.0) -> float:
    """Minimal a >= 0 with |ln psi - (J - t^2)| <= a t on the grid past t_min."""
    if t_min < table.grid[0] or t_min > table.grid[-1]:
        raise ValueError(f"t_min {t_min} outside table range")
    a = 0.0
    for t, b in zip(table.grid, table.ln_psi):
        if t < t_min or t == 0.0:
            continue
        gap = abs(b - (J_quad(float(t)) - t * t)) / t
        a = max(a, gap)
    return a


def write_mgf_csv(table: MgfTable, path) -> None:
    with open(path, "w") as fh:
        fh.write("t,lnPsi\n")
        for t, v in zip(table.grid, table.ln_psi):
            fh.write(f"{float(t)!r},{float(v)!r}\n")


def table_record(table: MgfTable, t_min: float = 1.0) -> dict:
    """JSON-ready summary: fitted slack, residual, iteration count."""
    return {
        "tMax": float(table.grid[-1]),
        "gridSize": int(len(table.grid)),
        "iterations": table.iterations,
        "residual": table.residual,
        "converged": table.converged,
        "fittedSlack": fit_slack(table, t_min),
        "slackTmin": t_min,
    }
