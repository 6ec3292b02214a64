"""Named verification suites behind the `verify` CLI command.

Each check evaluates one numerically checkable claim and returns a
CheckResult; a suite passes when all its checks do. Expensive artifacts
(psi tables, exact PMFs, Monte Carlo batches) are shared through a lazy
context so `--suite all` builds each only once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import bounds as bd
from . import exactdist as ed
from . import largedev as lv
from . import limitmgf as lm
from . import sampler as sp
from .specfun import CONSTANTS, J_quad, TWO_E, s_series, solve_tw, solve_w

# exact gain ratios delta * x / (ln x)^2, frozen from a 50-digit evaluation
DELTA_RATIO_1E8 = 2.668933559
DELTA_RATIO_1E10 = 2.567606345


@dataclass
class CheckResult:
    check_id: str
    claim: str
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"id": self.check_id, "claim": self.claim,
                "pass": bool(self.passed), "details": _jsonable(self.details)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


class VerifyContext:
    """Lazy shared artifacts plus run parameters for the suites."""

    def __init__(self, mc_reps: int = 1_000_000, mc_seed: int = 20260810,
                 workers: int = 1):
        self.mc_reps = mc_reps
        self.mc_seed = mc_seed
        self.workers = workers
        self._cache: dict = {}

    def psi_table(self, grid_size: int = 256) -> lm.MgfTable:
        key = ("psi", grid_size)
        if key not in self._cache:
            self._cache[key] = lm.fixpoint_psi(t_max=12.0, grid_size=grid_size,
                                               tol=1e-9, max_iter=60)
        return self._cache[key]

    def pmf(self, n: int, mode: str = "float") -> ed.ExactPmf:
        key = ("pmf", n, mode)
        if key not in self._cache:
            self._cache[key] = ed.exact_pmf(n, mode)
        return self._cache[key]

    def mc_batch(self, n: int, reps: int, thresholds) -> sp.SampleBatch:
        key = ("mc", n, reps, tuple(thresholds))
        if key not in self._cache:
            self._cache[key] = sp.sample_batch(
                n, reps, seed=self.mc_seed, thresholds=thresholds,
                workers=self.workers)
        return self._cache[key]


# ---------------------------------------------------------------- lemma

def _suite_lemma(ctx: VerifyContext):
    grid = [6.0 + 0.5 * i for i in range(17)]
    minus = {t: lm.lambda_ratio(t, 1e-9, "minus") for t in grid}
    plus = {t: lm.lambda_ratio(t, 1e-9, "plus") for t in grid}
    t2 = None
    for t in grid:
        if all(minus[s] < 1.0 for s in grid if s >= t):
            t2 = t
            break
    yield CheckResult(
        "lemma.minus-below-one",
        "contraction ratio with the damping factor stays below 1 on [6, 14]",
        all(v < 1.0 for v in minus.values()),
        {"ratios": minus, "empirical_threshold": t2})
    yield CheckResult(
        "lemma.plus-above-one",
        "ratio with the reversed factor stays above 1 on [6, 14]",
        all(v > 1.0 for v in plus.values()),
        {"ratios": plus})
    close = {t: max(abs(minus[t] - 1.0), abs(plus[t] - 1.0))
             for t in grid if t >= 8.0}
    yield CheckResult(
        "lemma.ratio-near-one",
        "both ratios are within 1e-3 of 1 for t >= 8",
        all(v <= 1e-3 for v in close.values()),
        {"max_abs_gap": max(close.values())})


# ------------------------------------------------------------- sandwich

def _suite_sandwich(ctx: VerifyContext):
    tab = ctx.psi_table(256)
    yield CheckResult(
        "sandwich.origin",
        "ln psi(0) is exactly 0",
        tab.ln_psi[0] == 0.0, {"value": float(tab.ln_psi[0])})
    d2 = np.diff(tab.ln_psi, 2)
    yield CheckResult(
        "sandwich.log-convex",
        "second differences of ln psi are above -1e-9",
        float(d2.min()) >= -1e-9, {"min_second_diff": float(d2.min())})
    yield CheckResult(
        "sandwich.monotone",
        "ln psi is nondecreasing on the grid",
        bool(np.all(np.diff(tab.ln_psi) >= 0.0)), {})
    yield CheckResult(
        "sandwich.fixed-point",
        "one more application of the map moves no grid value by the stop tol",
        tab.converged and tab.residual < tab.tol,
        {"iterations": tab.iterations, "residual": tab.residual})
    a1 = lm.fit_slack(tab, 1.0)
    yield CheckResult(
        "sandwich.slack",
        "|ln psi - (J - t^2)| <= a t on [1, 12] with a at most 10",
        a1 <= 10.0, {"fitted_a": a1})
    a2 = lm.fit_slack(ctx.psi_table(512), 1.0)
    yield CheckResult(
        "sandwich.slack-stable",
        "fitted slack moves under 20% when the grid is doubled",
        abs(a2 - a1) <= 0.2 * a1, {"a_256": a1, "a_512": a2})


# ------------------------------------------------------------- chernoff

def _suite_chernoff(ctx: VerifyContext):
    tab = ctx.psi_table(256)
    worst = math.inf
    for n in (20, 40):
        law = ed.zhat_law(ctx.pmf(n, "float"))
        for t in tab.grid[1:]:
            gap = float(tab.ln_psi[np.searchsorted(tab.grid, t)]) \
                - ed.ln_mgf_hat(law, float(t))
            worst = min(worst, gap)
    yield CheckResult(
        "chernoff.majorization",
        "the (n+1)-scaled mgf stays below the limiting table for n = 20, 40",
        worst >= math.log(1.0 / (1.0 + 1e-6)),
        {"min_ln_gap": worst})

    a_fit = lm.fit_slack(tab, 1.0)
    law50 = ed.zhat_law(ctx.pmf(50, "float"))
    rows = []
    ok = True
    for x in np.linspace(TWO_E, 8.0, 12):
        x = float(x)
        p = float(ed.tail_prob(law50, x, strict=True))
        if p <= 0.0:
            rows.append({"x": x, "empirical": None})
            continue
        w = solve_w(x).w
        envelope = bd.new_upper_F(x, 0.0) + a_fit * w
        rows.append({"x": x, "empirical": math.log(p), "envelope": envelope})
        ok &= math.log(p) <= envelope
    yield CheckResult(
        "chernoff.dominance",
        "exact n = 50 log-tails sit below the sharp exponent with the fitted slack",
        ok, {"a_fit": a_fit, "rows": rows})

    bit_ok = True
    for x in (TWO_E, 10.0, 50.0, 300.0):
        w = solve_w(x).w
        bit_ok &= bd.new_upper_F(x, 0.0) == bd.chernoff(
            x, w, J_quad(w) - w * w)
    yield CheckResult(
        "chernoff.composition",
        "sharp exponent is bitwise the Chernoff value at t = w",
        bit_ok, {})

    x = 50.0
    ts = np.arange(max(1.0, solve_w(x).w - 0.5), solve_w(x).w + 0.7, 1e-3)
    vals = [bd.chernoff(x, float(t), J_quad(float(t)) - t * t) for t in ts]
    tw = solve_tw(x, 0.0).tw
    at_tw = bd.chernoff(x, tw, J_quad(tw) - tw * tw)
    gap = abs(min(vals) - at_tw)
    yield CheckResult(
        "chernoff.optimal-abscissa",
        "grid minimum of the Chernoff exponent matches the abscissa solver to 1e-3",
        gap <= 1e-3, {"grid_min": min(vals), "at_solver": at_tw})

    gains = {x: bd.delta_gain(float(x), 0.0) for x in (1e2, 1e4, 1e6, 1e8)}
    yield CheckResult(
        "chernoff.gain-nonnegative",
        "re-optimizing the abscissa never hurts the exponent",
        all(v >= 0.0 for v in gains.values()), {"gains": gains})

    r8 = bd.delta_gain(1e8, 0.0) * 1e8 / math.log(1e8) ** 2
    r10 = bd.delta_gain(1e10, 0.0) * 1e10 / math.log(1e10) ** 2
    yield CheckResult(
        "chernoff.gain-ratio",
        "scaled gain matches its exact values and moves toward 2",
        abs(r8 - DELTA_RATIO_1E8) < 1e-3 and abs(r10 - DELTA_RATIO_1E10) < 1e-3
        and abs(r10 - 2.0) < abs(r8 - 2.0),
        {"ratio_1e8": r8, "ratio_1e10": r10})

    x0 = bd.upper_crossover()
    yield CheckResult(
        "chernoff.exponent-order",
        "sharp exponent sits below the three-term upper form past a crossover under 1e6",
        x0 < 1e6, {"crossover": x0,
                   "janson_vs_xa": bd.janson_vs_xa_crossover()})


# ------------------------------------------------------------------- ks

def _suite_ks(ctx: VerifyContext):
    ks = {}
    for n in (10, 20, 40):
        ks[n] = ed.ks_distance(ed.z_law(ctx.pmf(n, "float")),
                               ed.z_law(ctx.pmf(2 * n, "float")))
    decreasing = ks[10] > ks[20] > ks[40]
    yield CheckResult(
        "ks.decay",
        "distance between the n and 2n laws decreases over n = 10, 20, 40",
        decreasing, {"distances": ks})
    c_fit = max(math.log(ks[n] * math.sqrt(n)) / math.sqrt(math.log(n))
                for n in ks)
    bounded = all(ks[n] <= lv.ks_bound(n, c_fit) * (1.0 + 1e-12) for n in ks)
    yield CheckResult(
        "ks.bound",
        "one fitted constant bounds all distances in the n^{-1/2} e^{C sqrt(ln n)} shape",
        bounded, {"C_fit": c_fit})
    yield CheckResult(
        "ks.zero-slack",
        "the zero-slack bound is exactly n^{-1/2}",
        all(lv.ks_bound(n, 0.0) == n ** -0.5 for n in (4, 100, 10**6)), {})


# ------------------------------------------------------------- extremes

def _suite_extremes(ctx: VerifyContext):
    path_ok = True
    for n in range(1, 13):
        pm = ctx.pmf(n, "rational")
        path_ok &= pm.prob(pm.support_max) == Fraction(2 ** (n - 1),
                                                       math.factorial(n))
    yield CheckResult(
        "extremes.path-probability",
        "the top support point carries exactly 2^{n-1}/n! for n <= 12",
        path_ok, {})

    rows = []
    ok = True
    flagged = True
    for n in (3, 7, 15):
        ex = ed.extremes(n, require_perfect=True)
        pm = ctx.pmf(n, "rational")
        exact = pm.prob(ex.min_val)
        formula = ed.perfect_tree_prob_formula(n)
        N = n + 1
        shifted = math.exp(-CONSTANTS.s1 * N + s_series(float(N + 1), 1e-13))
        ok &= exact == ex.min_prob
        ok &= abs(formula / float(exact) - 1.0) <= 1e-6
        flagged &= abs(shifted / float(exact) - 1.0) > 1e-2
        rows.append({"n": n, "exact": exact, "formula": formula,
                     "shifted_index_variant": shifted,
                     "shifted_variant_rejected": abs(shifted / float(exact) - 1.0) > 1e-2})
    yield CheckResult(
        "extremes.perfect-tree",
        "best-case probabilities match exp(-s(1) N + s(N)) (n = 3, 7, 15)",
        ok, {"rows": rows})
    yield CheckResult(
        "extremes.shifted-index-flag",
        "the shifted-index variant exp(-s(1) N + s(N+1)) disagrees with the exact values",
        flagged, {"rows": rows})

    scale_ok = True
    for n in (3, 7, 15):
        ex = ed.extremes(n)
        law = ed.zhat_law(ctx.pmf(n, "float"))
        atoms = law.atoms_float()
        scale_ok &= abs(atoms.max() - ex.lambda_n) <= 1e-12
        scale_ok &= abs(atoms.min() + ex.sigma_n) <= 1e-12
    yield CheckResult(
        "extremes.scaled-range",
        "extremes of the (n+1)-scaled law match the closed forms",
        scale_ok, {})


# ------------------------------------------------------------------- ld

def _suite_ld(ctx: VerifyContext):
    ver50 = lv.verify_ld(50, [1.0, 2.0, 3.0, 6.0, 7.0], ctx.pmf(50, "float"))
    yield CheckResult(
        "ld.exact-envelopes",
        "n = 50 exact log-tails lie between the fitted envelopes",
        ver50.passed, ver50.to_dict())

    thresholds = (1.5, 2.0, 3.0)
    batch = ctx.mc_batch(10**4, ctx.mc_reps, thresholds)
    ver_mc = lv.verify_ld(10**4, thresholds, batch)
    yield CheckResult(
        "ld.mc-envelopes",
        "n = 1e4 Monte Carlo log-tails lie between the fitted envelopes",
        ver_mc.passed, ver_mc.to_dict())

    small = ctx.mc_batch(10**4, 30_000, thresholds)
    rel = small.variance / CONSTANTS.var_z - 1.0
    yield CheckResult(
        "ld.mc-variance",
        "n = 1e4 sample variance is within 5% of the limiting variance",
        abs(rel) <= 0.05,
        {"variance": small.variance, "target": CONSTANTS.var_z,
         "relative_gap": rel, "reps": small.count, "seed": small.seed})

    win = lv.ld_window(10**4)
    l6 = lv.left_ld(10**6, 2.0)
    l8 = lv.left_ld(10**8, 2.0)
    yield CheckResult(
        "ld.domains",
        "window and left-tail domains evaluate with explicit guards",
        (not l6.domain_ok) and (win.lo == 1.5),
        {"window": {"lo": win.lo, "hi": win.hi, "nonempty": win.nonempty},
         "left_1e6": {"ok": l6.domain_ok, "reason": l6.reason},
         "left_1e8": {"ok": l8.domain_ok, "reason": l8.reason}})


_SUITES = {
    "lemma": _suite_lemma,
    "sandwich": _suite_sandwich,
    "chernoff": _suite_chernoff,
    "ks": _suite_ks,
    "extremes": _suite_extremes,
    "ld": _suite_ld,
}

SUITE_NAMES = tuple(_SUITES) + ("all",)


@dataclass
class SuiteReport:
    suite: str
    checks: list
    passed: bool

    def to_dict(self) -> dict:
        return {"schemaVersion": 1, "suite": self.suite, "pass": self.passed,
                "checks": [c.to_dict() for c in self.checks]}


def run_suite(name: str, ctx: VerifyContext | None = None) -> SuiteReport:
    if name not in SUITE_NAMES:
        raise ValueError(f"unknown suite {name!r}; choose from {SUITE_NAMES}")
    ctx = ctx or VerifyContext()
    names = list(_SUITES) if name == "all" else [name]
    checks = []
    for nm in names:
        checks.extend(_SUITES[nm](ctx))
    return SuiteReport(suite=name, checks=checks,
                       passed=all(c.passed for c in checks))
