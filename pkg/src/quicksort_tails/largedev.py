"""Finite-n large-deviation evaluators and empirical envelope checks.

Exponents follow the right-tail forms (lower three-term, sharp upper,
simple upper, bounded-difference) and the left-tail doubly exponential
forms, each with explicit caller slacks; verify_ld fits one slack per
claim shape across a whole grid and reports containment of the empirical
log-tails between the fitted envelopes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .bounds import new_upper_F
from .exactdist import ExactPmf, tail_prob, z_law
from .sampler import SampleBatch
from .specfun import CONSTANTS, TWO_E, mu


def iterated_log(n: float, k: int):
    """k-fold iterated natural log; None once an iterate leaves (0, inf)."""
    v = float(n)
    for _ in range(k):
        if v <= 0.0:
            return None
        v = math.log(v)
    return v


@dataclass(frozen=True)
class LdWindow:
    """Deviation window [c, (ln n / (2 ln ln n)) (1 - omega_n / ln ln n)].

    Empty windows are a reportable state (they are empty at desk-scale n
    for any c > 1), never an error.
    """
    n: int
    c: float
    omega_n: float
    lo: float
    hi: float

    @property
    def nonempty(self) -> bool:
        return self.lo < self.hi

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi


def ld_window(n: int, c: float = 1.5, omega_n: float | None = None) -> LdWindow:
    """Window for deviation abscissas; c = 1.5 is an artifact default, and
    omega_n defaults to max(ln ln ln n, 1) as a slowly diverging choice."""
    if n < 3:
        raise ValueError(f"ld_window requires n >= 3, got {n}")
    if c <= 1.0:
        raise ValueError(f"ld_window requires c > 1, got {c}")
    l2 = iterated_log(n, 2)
    if omega_n is None:
        l3 = iterated_log(n, 3)
        omega_n = max(l3 if l3 is not None else 1.0, 1.0)
    hi = 0.5 * (math.log(n) / l2) * (1.0 - omega_n / l2)
    return LdWindow(n=n, c=c, omega_n=omega_n, lo=c, hi=hi)


def mcd_range(n: int) -> tuple[float, float]:
    """Abscissa range (mu_n / (n ln n), mu_n / n] of the bounded-difference
    deviation result."""
    if n < 2:
        raise ValueError(f"mcd_range requires n >= 2, got {n}")
    m = float(mu(n, "float"))
    return m / (n * math.log(n)), m / n


@dataclass(frozen=True)
class LdSlacks:
    """Per-claim slack constants (fitted or caller-supplied)."""
    c_lower: float = 0.0    # linear term of the lower envelope
    a_upper: float = 0.0    # ln x coefficient of the sharp upper envelope
    c_simple: float = 0.0   # extra linear slack on the simple upper form
    c_lll: float = 0.0      # coefficient of x * ln ln ln n in the mcd form


@dataclass(frozen=True)
class LdExponents:
    lower: float | None
    upper_sharp: float | None
    upper_simple: float | None
    mcd: float | None


def ld_exponents(n: int, x: float, slacks: LdSlacks = LdSlacks()) -> LdExponents:
    """All four deviation exponents at abscissa x, None outside domains."""
    lower = upper_simple = None
    if x > 1.0:
        lead = -x * math.log(x) - x * math.log(math.log(x))
        lower = lead + slacks.c_lower * x
        upper_simple = lead + (1.0 + math.log(2.0) + slacks.c_simple) * x
    upper_sharp = new_upper_F(x, slacks.a_upper) if x >= TWO_E else None
    mcd = None
    lo, hi = mcd_range(n)
    l3 = iterated_log(n, 3)
    if lo < x <= hi and l3 is not None:
        mcd = -x * (math.log(x) + slacks.c_lll * l3)
    return LdExponents(lower=lower, upper_sharp=upper_sharp,
                       upper_simple=upper_simple, mcd=mcd)


def ks_bound(n: int, C: float = 0.0) -> float:
    """Distribution-distance bound n^{-1/2} e^{C sqrt(ln n)}.

    Written as a product so the C = 0 case is exactly n^{-1/2}.
    """
    if n < 2:
        raise ValueError(f"ks_bound requires n >= 2, got {n}")
    return n ** -0.5 * math.exp(C * math.sqrt(math.log(n)))


@dataclass(frozen=True)
class LeftLd:
    ln_upper: float
    ln_lower: float
    domain_ok: bool
    reason: str


def left_ld(n: int, x: float, c_upper: float = 0.0, c_lower: float = 0.0,
            omega_n: float = 1.0) -> LeftLd:
    """Left-tail deviation bounds with the iterated-log domain check.

    domain_ok demands x <= (L2 n - L4 n - omega_n) / Gamma; for n below
    e^e^e the fourth iterated log does not exist and the domain is
    reported unusable rather than silently extended.
    """
    if x <= 1.0:
        raise ValueError(f"left_ld requires x > 1, got {x}")
    gx = CONSTANTS.gamma_cap * x

    def neg_exp(arg):
        return -math.inf if arg > 709.0 else -math.exp(arg)

    ln_upper = neg_exp(gx + c_upper)
    ln_lower = neg_exp(gx + math.log(math.log(x)) + c_lower)
    l2 = iterated_log(n, 2)
    l4 = iterated_log(n, 4)
    if l4 is None:
        return LeftLd(ln_upper, ln_lower, False,
                      f"fourth iterated log undefined at n = {n}")
    cap = (l2 - l4 - omega_n) / CONSTANTS.gamma_cap
    if x > cap:
        return LeftLd(ln_upper, ln_lower, False,
                      f"x = {x} above the window cap {cap:.6g}")
    return LeftLd(ln_upper, ln_lower, True, "")


@dataclass(frozen=True)
class LdRow:
    n: int
    x: float
    ln_empirical: float | None
    exponents: LdExponents
    in_window: bool
    insufficient_tail: bool
    passed: bool | None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "x": self.x,
            "empirical": self.ln_empirical,
            "exponents": {
                "lower": self.exponents.lower,
                "upperSharp": self.exponents.upper_sharp,
                "upperSimple": self.exponents.upper_simple,
                "mcd": self.exponents.mcd,
            },
            "window": self.in_window,
            "insufficientTail": self.insufficient_tail,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class LdVerification:
    n: int
    source: str
    slacks: LdSlacks
    fitted: bool
    window: LdWindow
    rows: list[LdRow] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        checked = [r.passed for r in self.rows if r.passed is not None]
        return bool(checked) and all(checked)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "source": self.source,
            "fitted": self.fitted,
            "slacks": {"cLower": self.slacks.c_lower, "aUpper": self.slacks.a_upper,
                       "cSimple": self.slacks.c_simple, "cLll": self.slacks.c_lll},
            "window": {"lo": self.window.lo, "hi": self.window.hi,
                       "omega": self.window.omega_n, "nonempty": self.window.nonempty},
            "rows": [r.to_dict() for r in self.rows],
            "pass": self.passed,
        }


def _empirical_ln_tails(source, x_grid):
    if isinstance(source, ExactPmf):
        law = z_law(source)
        out = []
        for x in x_grid:
            p = float(tail_prob(law, float(x), strict=True))
            out.append(math.log(p) if p > 0.0 else None)
        return source.n, "exact", out
    if isinstance(source, SampleBatch):
        out = []
        for x in x_grid:
            if float(x) not in source.tail_counts:
                raise KeyError(
                    f"batch lacks tail threshold {x}; re-run sampling with it")
            c = source.tail_counts[float(x)]
            out.append(math.log(c / source.count) if c > 0 else None)
        return source.n, "montecarlo", out
    raise TypeError(f"unsupported source {type(source).__name__}")


def verify_ld(n: int, x_grid, source, slacks: LdSlacks | None = None,
              window_c: float = 1.5) -> LdVerification:
    """Envelope check of empirical log-tails against the deviation forms.

    With slacks=None, one constant per claim shape is fitted across the
    grid (the smallest making its envelope valid wherever both sides
    exist), then containment lower <= empirical <= upperSharp is reported
    per abscissa. Zero-count abscissas are flagged, not failed.
    """
    src_n, src_name, ln_emp = _empirical_ln_tails(source, x_grid)
    if src_n != n:
        raise ValueError(f"source is for n = {src_n}, requested n = {n}")
    fitted = slacks is None
    if fitted:
        c_lo = math.inf
        a_up = -math.inf
        for x, le in zip(x_grid, ln_emp):
            if le is None:
                continue
            x = float(x)
            if x > 1.0:
                c_lo = min(c_lo, (le + x * math.log(x)
                                  + x * math.log(math.log(x))) / x)
            if x >= TWO_E:
                a_up = max(a_up, (le - new_upper_F(x, 0.0)) / math.log(x))
        slacks = LdSlacks(
            c_lower=0.0 if math.isinf(c_lo) else c_lo,
            a_upper=0.0 if math.isinf(a_up) else a_up,
        )
    window = ld_window(n, c=window_c)
    rows = []
    for x, le in zip(x_grid, ln_emp):
        x = float(x)
        exps = ld_exponents(n, x, slacks)
        if le is None:
            rows.append(LdRow(n=n, x=x, ln_empirical=None, exponents=exps,
                              in_window=window.contains(x),
                              insufficient_tail=True, passed=None))
            continue
        ok = True
        applicable = False
        if exps.lower is not None:
            applicable = True
            ok &= exps.lower <= le + 1e-12
        if exps.upper_sharp is not None:
            applicable = True
            ok &= le <= exps.upper_sharp + 1e-12
        rows.append(LdRow(n=n, x=x, ln_empirical=le, exponents=exps,
                          in_window=window.contains(x),
                          insufficient_tail=False,
                          passed=ok if applicable else None))
    return LdVerification(n=n, source=src_name, slacks=slacks, fitted=fitted,
                          window=window, rows=rows)
