"""Exact distribution of the QuickSort comparison count X_n.

The PMF is built bottom-up from the pivot recurrence: conditioning on a
uniform pivot rank i splits the problem into independent subproblems of
sizes i-1 and n-i plus n-1 comparisons, so

    p_n = (1/n) sum_i (p_{i-1} * p_{n-i}) shifted by n-1,

where * is convolution. Rational mode keeps integer permutation counts
over the common denominator n! (the count recurrence picks up a binomial
factor C(n-1, i-1)); float mode convolves double-precision arrays.
Convolutions for pivot ranks i and n+1-i coincide, so only half are done.

Built PMFs are cached per mode and immutable once returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .specfun import CONSTANTS, harmonic, mu, s_series

DEFAULT_RATIONAL_CAP = 30
DEFAULT_FLOAT_CAP = 120

_count_cache: dict[int, list[int]] = {0: [1], 1: [1]}   # n -> permutation counts, offset min_comparisons(n)
_float_cache: dict[int, np.ndarray] = {0: np.array([1.0]), 1: np.array([1.0])}


class PmfSizeError(ValueError):
    """Requested n exceeds the configured cap for the arithmetic mode."""


@dataclass(frozen=True, eq=False)
class ExactPmf:
    """Dense PMF of X_n: weights[k] is P(X_n = offset + k)."""
    n: int
    offset: int
    weights: tuple | np.ndarray
    mode: str  # "rational" | "float"

    @property
    def support_max(self) -> int:
        return self.offset + len(self.weights) - 1

    def prob(self, k: int):
        """P(X_n = k); zero off the stored range."""
        idx = k - self.offset
        if 0 <= idx < len(self.weights):
            return self.weights[idx]
        return Fraction(0) if self.mode == "rational" else 0.0

    def total(self):
        if self.mode == "rational":
            return sum(self.weights, Fraction(0))
        return float(np.sum(self.weights))

    def mean(self):
        if self.mode == "rational":
            acc = Fraction(0)
            for i, w in enumerate(self.weights):
                acc += (self.offset + i) * w
            return acc
        ks = self.offset + np.arange(len(self.weights))
        return float(np.dot(ks, self.weights))

    def variance(self):
        if self.mode == "rational":
            m = self.mean()
            acc = Fraction(0)
            for i, w in enumerate(self.weights):
                acc += (Fraction(self.offset + i) - m) ** 2 * w
            return acc
        ks = self.offset + np.arange(len(self.weights), dtype=float)
        m = float(np.dot(ks, self.weights))
        return float(np.dot((ks - m) ** 2, self.weights))


@dataclass(frozen=True, eq=False)
class ScaledLaw:
    """View of an ExactPmf under (X_n - mu_n) / denom scaling."""
    base: ExactPmf
    denom: int  # n or n + 1

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def center(self):
        return mu(self.base.n, "exact" if self.base.mode == "rational" else "float")

    def atoms(self):
        """Scaled support, same order as the base weights."""
        if self.base.mode == "rational":
            c = self.center
            return [(self.base.offset + i - c) / self.denom
                    for i in range(len(self.base.weights))]
        ks = self.base.offset + np.arange(len(self.base.weights), dtype=float)
        return (ks - self.center) / self.denom

    def atoms_float(self) -> np.ndarray:
        if self.base.mode == "rational":
            return np.array([float(a) for a in self.atoms()])
        return self.atoms()

    def weights_float(self) -> np.ndarray:
        if self.base.mode == "rational":
            return np.array([float(w) for w in self.base.weights])
        return np.asarray(self.base.weights)


def z_law(pmf: ExactPmf) -> ScaledLaw:
    """Classical scaling (X_n - mu_n) / n."""
    return ScaledLaw(base=pmf, denom=pmf.n)


def zhat_law(pmf: ExactPmf) -> ScaledLaw:
    """Modified scaling (X_n - mu_n) / (n + 1); its MGF is majorized by the
    limiting one for every n."""
    return ScaledLaw(base=pmf, denom=pmf.n + 1)


def min_comparisons(n: int) -> int:
    """Smallest possible comparison count (best-case recursion tree).

    The split recurrence min_i [m-1 + best(i-1) + best(m-i)] is minimized
    by the balanced split (its increments floor(lg k) are nondecreasing),
    which telescopes to sum_{k<=n} floor(lg k) in closed form.
    """
    if n < 2:
        return 0
    k = n.bit_length() - 1
    return (n + 1) * k - 2 ** (k + 1) + 2


def _conv_int(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


def _counts(n: int) -> list[int]:
    """Permutation counts of X_n (denominator n!), dense from min_comparisons(n)."""
    if n in _count_cache:
        return _count_cache[n]
    for m in range(2, n + 1):  # all entries below m are cached by the time m builds
        if m in _count_cache:
            continue
        acc = [0] * (m * (m - 1) // 2 - min_comparisons(m) + 1)
        base = min_comparisons(m)
        for i in range(1, m // 2 + 1):
            left, right = _counts(i - 1), _counts(m - i)
            seg = _conv_int(left, right)
            coef = 2 * math.comb(m - 1, i - 1)  # pivot ranks i and m+1-i agree
            lo = (m - 1) + min_comparisons(i - 1) + min_comparisons(m - i) - base
            for j, v in enumerate(seg):
                if v:
                    acc[lo + j] += coef * v
        if m % 2 == 1:
            i = (m + 1) // 2
            half = _counts(i - 1)
            seg = _conv_int(half, half)
            coef = math.comb(m - 1, i - 1)
            lo = (m - 1) + 2 * min_comparisons(i - 1) - base
            for j, v in enumerate(seg):
                if v:
                    acc[lo + j] += coef * v
        _count_cache[m] = acc
    return _count_cache[n]


def _float_pmf(n: int) -> np.ndarray:
    if n in _float_cache:
        return _float_cache[n]
    for m in range(2, n + 1):
        if m in _float_cache:
            continue
        base = min_comparisons(m)
        acc = np.zeros(m * (m - 1) // 2 - base + 1)
        for i in range(1, m // 2 + 1):
            seg = np.convolve(_float_pmf(i - 1), _float_pmf(m - i))
            lo = (m - 1) + min_comparisons(i - 1) + min_comparisons(m - i) - base
            acc[lo:lo + len(seg)] += 2.0 * seg
        if m % 2 == 1:
            half = _float_pmf((m + 1) // 2 - 1)
            seg = np.convolve(half, half)
            lo = (m - 1) + 2 * min_comparisons((m + 1) // 2 - 1) - base
            acc[lo:lo + len(seg)] += seg
        acc /= m
        acc.setflags(write=False)
        _float_cache[m] = acc
    return _float_cache[n]


def exact_pmf(n: int, mode: str = "rational", cap: int | None = None) -> ExactPmf:
    """PMF of X_n. Rational mode is exact; float mode extends the reach.

    Raises PmfSizeError past the cap (default 30 rational / 120 float);
    the error names the estimated cost so callers can raise the cap
    deliberately.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if mode == "rational":
        limit = DEFAULT_RATIONAL_CAP if cap is None else cap
        if n > limit:
            est_s = (n / 30.0) ** 5 * 4.0
            raise PmfSizeError(
                f"n = {n} exceeds rational cap {limit}: ~{n * n // 2} support "
                f"points of big-integer counts, est. {est_s:.0f} s to build")
        counts = _counts(n)
        denom = math.factorial(n)
        weights = tuple(Fraction(c, denom) for c in counts)
        return ExactPmf(n=n, offset=min_comparisons(n), weights=weights,
                        mode="rational")
    if mode == "float":
        limit = DEFAULT_FLOAT_CAP if cap is None else cap
        if n > limit:
            est_mb = n ** 3 / 6.0 * 8e-6
            est_s = (n / 120.0) ** 5 * 8.0
            raise PmfSizeError(
                f"n = {n} exceeds float cap {limit}: est. {est_mb:.0f} MB of "
                f"cached arrays, {est_s:.0f} s to build")
        return ExactPmf(n=n, offset=min_comparisons(n), weights=_float_pmf(n),
                        mode="float")
    raise ValueError(f"unknown mode {mode!r}")


def tail_prob(law: ScaledLaw, x, strict: bool = True):
    """P(scaled variable > x), or >= x with strict=False."""
    if law.base.mode == "rational":
        total = Fraction(0)
        for a, w in zip(law.atoms(), law.base.weights):
            if (a > x) if strict else (a >= x):
                total += w
        return total
    atoms = law.atoms_float()
    side = "right" if strict else "left"
    idx = np.searchsorted(atoms, x, side=side)
    return float(np.sum(law.weights_float()[idx:]))


def ln_mgf_hat(law: ScaledLaw, t: float) -> float:
    """ln E exp(t * scaled variable), via log-sum-exp."""
    zs = law.atoms_float()
    with np.errstate(divide="ignore"):
        ln_w = np.log(law.weights_float())
    vals = ln_w + t * zs
    m = np.max(vals)
    return float(m + np.log(np.sum(np.exp(vals - m))))


def mgf_hat(law: ScaledLaw, t: float) -> float:
    """E exp(t * scaled variable); raises on double overflow."""
    ln_v = ln_mgf_hat(law, t)
    if ln_v > 709.0:
        raise OverflowError(
            f"mgf value exp({ln_v:.3f}) exceeds double range; use ln_mgf_hat")
    return math.exp(ln_v)


def _survivals(law: ScaledLaw, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(P(Z > p), P(Z >= p)) for each evaluation point."""
    atoms = law.atoms_float()
    w = law.weights_float()
    # cumulative mass at atoms >= atoms[i]
    tail = np.concatenate([np.cumsum(w[::-1])[::-1], [0.0]])
    gt = tail[np.searchsorted(atoms, points, side="right")]
    ge = tail[np.searchsorted(atoms, points, side="left")]
    return gt, ge


def ks_distance(a: ScaledLaw, b: ScaledLaw) -> float:
    """sup_x |P(A > x) - P(B > x)| between two purely atomic laws.

    The sup is attained at an atom of either law or in the limit from the
    left of one, so both one-sided survival values are compared at every
    atom of the union.
    """
    pts = np.unique(np.concatenate([a.atoms_float(), b.atoms_float()]))
    gt_a, ge_a = _survivals(a, pts)
    gt_b, ge_b = _survivals(b, pts)
    return float(max(np.max(np.abs(gt_a - gt_b)), np.max(np.abs(ge_a - ge_b))))


@dataclass(frozen=True)
class ExtremeStats:
    """Extreme-value summary of X_n and of the (n+1)-scaled variable.

    min_prob and sigma_n are only available when n = 2^k - 1 (the best
    case is then the perfect tree); lambda_n = max of the scaled variable,
    sigma_n = -min of it.
    """
    n: int
    max_val: int
    max_prob: Fraction
    min_val: int
    lambda_n: float
    min_prob: Fraction | None = None
    sigma_n: float | None = None

    @property
    def perfect(self) -> bool:
        return self.min_prob is not None


def extremes(n: int, require_perfect: bool = False) -> ExtremeStats:
    """Extreme values and probabilities; perfect-tree fields need n = 2^k - 1."""
    if n < 1:
        raise ValueError(f"extremes requires n >= 1, got {n}")
    N = n + 1
    perfect = (N & (N - 1)) == 0
    if require_perfect and not perfect:
        raise ValueError(
            f"perfect-tree fields require n = 2^k - 1, got n = {n}")
    h_n = harmonic(n, "float")
    lam = n * (n + 7) / (2.0 * N) - 2.0 * h_n
    stats = dict(
        n=n,
        max_val=n * (n - 1) // 2,
        max_prob=Fraction(2 ** (n - 1), math.factorial(n)),
        min_val=min_comparisons(n),
        lambda_n=lam,
    )
    if perfect:
        k = N.bit_length() - 1
        denom = 1
        for d in range(k):
            denom *= (2 ** (k - d) - 1) ** (2 ** d)
        stats["min_prob"] = Fraction(1, denom)
        stats["sigma_n"] = 2.0 * harmonic(N, "float") - k - 2.0
    return ExtremeStats(**stats)


def perfect_tree_prob_formula(n: int) -> float:
    """exp(-s(1) N + s(N)) with N = n + 1; exact for n = 2^k - 1.

    The companion shifted-index form exp(-s(1) N + s(N + 1)) does NOT
    reproduce the exact probabilities (1/3 at n = 3, 1/63 at n = 7); the
    verification report flags that variant as rejected.
    """
    N = n + 1
    return math.exp(-CONSTANTS.s1 * N + s_series(float(N), tol=1e-13))


def write_pmf_csv(pmf: ExactPmf, path) -> None:
    """CSV columns k,probability; rational weights as num/den strings."""
    with open(path, "w") as fh:
        fh.write("k,probability\n")
        for i, w in enumerate(pmf.weights):
            if pmf.mode == "rational":
                frac = str(w)  # num/den, or a bare integer for 0 and 1
                fh.write(f"{pmf.offset + i},{frac}\n")
            else:
                fh.write(f"{pmf.offset + i},{float(w)!r}\n")
