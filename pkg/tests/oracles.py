"""Independent reference implementations used only by the tests.

These deliberately avoid the library's code paths: permutation
enumeration for PMFs, mpmath for integrals and series, the textbook
closed forms for moments.
"""

import itertools
import math
from collections import Counter
from fractions import Fraction

import mpmath as mp

mp.mp.dps = 30


def quicksort_comparisons(seq) -> int:
    """Comparison count of first-element-pivot quicksort on distinct keys."""
    if len(seq) <= 1:
        return 0
    pivot = seq[0]
    smaller = [v for v in seq[1:] if v < pivot]
    larger = [v for v in seq[1:] if v > pivot]
    return len(seq) - 1 + quicksort_comparisons(smaller) \
        + quicksort_comparisons(larger)


def brute_force_counts(n: int) -> Counter:
    """Histogram of comparison counts over all n! input permutations."""
    return Counter(quicksort_comparisons(list(p))
                   for p in itertools.permutations(range(n)))


def mu_recurrence(n: int) -> Fraction:
    """Mean comparisons by the divide-and-conquer mean recurrence
    m_n = n - 1 + (2/n) sum_{k<n} m_k (independent of the closed form)."""
    means = [Fraction(0)]
    for m in range(1, n + 1):
        means.append(m - 1 + Fraction(2, m) * sum(means))
    return means[n]


def variance_closed_form(n: int) -> Fraction:
    """Var X_n = 7n^2 - 4(n+1)^2 H2_n - 2(n+1) H_n + 13n."""
    h1 = sum(Fraction(1, k) for k in range(1, n + 1))
    h2 = sum(Fraction(1, k * k) for k in range(1, n + 1))
    return 7 * n * n - 4 * (n + 1) ** 2 * h2 - 2 * (n + 1) * h1 + 13 * n


def J_mp(t: float) -> float:
    """J via the exponential integral: 2 (Ei(t) - Ei(1))."""
    return float(2 * (mp.ei(t) - mp.ei(1)))


def ln_J_mp(t: float) -> float:
    return float(mp.log(2 * (mp.ei(t) - mp.ei(1))))


def s_mp(nu: float, terms: int = 300) -> float:
    return float(mp.nsum(lambda j: 2 ** (-j) * mp.log(2 ** j * nu - 1),
                         [1, terms]))


# lambda(t)/hpsi(t) - 1, evaluated at 40 significant digits (mpmath quad
# over the split [0, e^{-t}, 10e^{-t}, 100e^{-t}, 1/100, 1/2])
LAMBDA_RATIO_MINUS = {
    6.0: -1.860147883e-6,
    7.0: -1.449977757e-5,
    8.0: -6.300576238e-6,
    10.0: -5.909683776e-7,
    12.0: -4.10563222e-8,
    14.0: -2.537503445e-9,
}
LAMBDA_RATIO_PLUS = {
    6.0: 3.790475169e-4,
    7.0: 8.302543099e-5,
    8.0: 1.839702799e-5,
    10.0: 9.397952855e-7,
    12.0: 5.033563099e-8,
    14.0: 2.770399199e-9,
}

# delta(x) x / (ln x)^2 at 50 significant digits
DELTA_RATIO = {1e8: 2.668933559, 1e10: 2.567606345}

# gap tw - w at x = 1e6, a = 0 (50 digits)
TW_GAP_1E6 = 3.3909713495e-5

J2 = 6.118233079291907  # J(2), mpmath
LNHPSI_MINUS_2 = -2.115040628501033  # lnhpsi(2), minus variant, mpmath
