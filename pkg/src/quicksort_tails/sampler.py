"""Reproducible Monte Carlo for comparison counts at large n.

Randomness protocol (fixed; results are part of the reproducibility
contract): the bit generator is numpy's Philox keyed by the 64-bit seed.
Philox advances in counter blocks of four 64-bit outputs, so sample i owns
blocks [i*B, (i+1)*B) with B = ceil(n/4) and uses the first n float64
draws of its slot. One draw of the subproblem-size recursion expands an
explicit LIFO stack seeded with n; a subproblem of size m >= 1 adds m - 1
comparisons, consumes one uniform u to form the pivot rank
1 + floor(u*m), and pushes the right child then the left child (sizes
m - pivot and pivot - 1, zero-size children dropped). Sizes below the
recursion cutoff are still expanded, so every key consumes its draw and a
sample needs exactly n draws.

Because draws are indexed by sample, any partitioning of samples across
workers reproduces identical batches bit for bit. Moments are accumulated
as exact integer sums of X and X^2 (stronger than compensated float
summation and order independent by construction).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .specfun import mu

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f
        if args and callable(args[0]):
            return args[0]
        return wrap


# Per-chunk float64 budget; chunk boundaries depend only on n, never on
# worker count, so the reduction order is fixed.
_CHUNK_DRAWS = 1 << 22


@njit(cache=True, nogil=True)
def _expand_chunk(u: np.ndarray, n: int, stride: int, out: np.ndarray) -> None:
    stack = np.empty(n + 1, dtype=np.int64)
    for s in range(out.shape[0]):
        base = s * stride
        used = 0
        total = 0
        top = 0
        if n > 0:
            stack[0] = n
            top = 1
        while top > 0:
            top -= 1
            m = stack[top]
            total += m - 1
            pivot = np.int64(u[base + used] * m) + 1
            used += 1
            right = m - pivot
            left = pivot - 1
            if right > 0:
                stack[top] = right
                top += 1
            if left > 0:
                stack[top] = left
                top += 1
        out[s] = total


def sample_comparisons(n: int, rng: np.random.Generator) -> int:
    """One draw of X_n from an externally supplied generator."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n == 0:
        return 0
    u = rng.random(n)
    out = np.empty(1, dtype=np.int64)
    _expand_chunk(u, n, n, out)
    return int(out[0])


@dataclass
class SampleBatch:
    """Deterministic Monte Carlo summary of Z_n = (X_n - mu_n) / n."""
    n: int
    seed: int
    count: int
    mean: float
    m2: float
    min: float
    max: float
    tail_counts: dict[float, int]
    sum_x: int
    sum_x_sq: int
    min_x: int
    max_x: int
    meta: dict = field(default_factory=dict)

    @property
    def variance(self) -> float:
        """Sample variance of Z_n (denominator count - 1)."""
        if self.count < 2:
            return math.nan
        return self.m2 / (self.count - 1)

    def tail_fraction(self, x: float) -> float:
        return self.tail_counts[x] / self.count


def _chunk_bounds(count: int, n: int):
    size = max(1, _CHUNK_DRAWS // max(n, 1))
    starts = range(0, count, size)
    return [(s, min(s + size, count)) for s in starts]


def _process_chunk(n, seed, lo, hi, thresholds_x):
    blocks = (n + 3) // 4  # Philox advances in blocks of 4 draws
    stride = 4 * blocks
    bitgen = np.random.Philox(key=seed)
    bitgen.advance(lo * blocks)  # sample i owns blocks [i*blocks, (i+1)*blocks)
    rng = np.random.Generator(bitgen)
    m = hi - lo
    u = rng.random(m * stride)
    counts = np.empty(m, dtype=np.int64)
    _expand_chunk(u, n, stride, counts)
    s1 = int(counts.sum())
    s2 = sum(v * v for v in counts.tolist())
    tails = [int(np.count_nonzero(counts > bx)) for bx in thresholds_x]
    return s1, s2, int(counts.min()), int(counts.max()), tails


def sample_batch(n: int, count: int, seed: int, thresholds=(),
                 workers: int = 1) -> SampleBatch:
    """Monte Carlo batch of Z_n with streaming exact moments.

    thresholds are on the Z_n scale; tail counts are of samples with
    Z_n strictly above each threshold. Identical (n, count, seed,
    thresholds) give bitwise-identical batches for any worker count.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    thresholds = tuple(float(t) for t in thresholds)
    mu_n = float(mu(n, "float"))
    # Z > x iff X > mu + n x; fixed float64 boundary arithmetic
    bounds_x = [mu_n + n * t for t in thresholds]
    chunks = _chunk_bounds(count, n)

    def work(chunk):
        lo, hi = chunk
        return _process_chunk(n, seed, lo, hi, bounds_x)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, chunks))
    else:
        results = [work(c) for c in chunks]

    # reduce in chunk order (results is already ordered by chunk index)
    s1 = 0
    s2 = 0
    mn = None
    mx = None
    tails = [0] * len(thresholds)
    for c1, c2, cmin, cmax, ctails in results:
        s1 += c1
        s2 += c2
        mn = cmin if mn is None else min(mn, cmin)
        mx = cmax if mx is None else max(mx, cmax)
        for i, tc in enumerate(ctails):
            tails[i] += tc

    mean_x = s1 / count
    # m2 of X = s2 - s1^2/count, formed exactly in integers before the
    # single float conversion
    m2_exact = (s2 * count - s1 * s1) / count
    return SampleBatch(
        n=n, seed=seed, count=count,
        mean=(mean_x - mu_n) / n,
        m2=m2_exact / (n * n),
        min=(mn - mu_n) / n,
        max=(mx - mu_n) / n,
        tail_counts=dict(zip(thresholds, tails)),
        sum_x=s1, sum_x_sq=s2, min_x=mn, max_x=mx,
        meta={"bit_generator": "Philox", "numpy": np.__version__,
              "draws_per_sample": n,
              "kernel": "numba" if _HAVE_NUMBA else "python"},
    )


def sample_counts(n: int, count: int, seed: int) -> np.ndarray:
    """Raw comparison counts X for samples 0..count-1 of the keyed stream.

    Same per-sample draws as sample_batch, so histogram totals agree with
    batch tail counts for any thresholds.
    """
    if count < 1 or n < 1:
        raise ValueError("need n >= 1 and count >= 1")
    out = np.empty(count, dtype=np.int64)
    blocks = (n + 3) // 4
    stride = 4 * blocks
    for lo, hi in _chunk_bounds(count, n):
        bitgen = np.random.Philox(key=seed)
        bitgen.advance(lo * blocks)
        u = np.random.Generator(bitgen).random((hi - lo) * stride)
        _expand_chunk(u, n, stride, out[lo:hi])
    return out


def write_batches_csv(batches, path) -> None:
    """One row per batch; tail columns tail_gt_<x> hold exceedance counts."""
    batches = list(batches)
    thresholds = sorted({x for b in batches for x in b.tail_counts})
    cols = ["n", "seed", "count", "mean", "variance", "min", "max",
            "sum_x", "sum_x_sq"] + [f"tail_gt_{x!r}" for x in thresholds]
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for b in batches:
            row = [str(b.n), str(b.seed), str(b.count), repr(b.mean),
                   repr(b.variance), repr(b.min), repr(b.max),
                   str(b.sum_x), str(b.sum_x_sq)]
            row += [str(b.tail_counts.get(x, "")) for x in thresholds]
            fh.write(",".join(row) + "\n")
