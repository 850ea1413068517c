"""Shapley value of the entropy cost game: exact, permutation-average and sampled."""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import (
    EXHAUSTIVE_CAP,
    FACTORIAL_CAP,
    RateVector,
    as_oracle,
    root_oracle,
    check_cap,
)
from .polyhedron import edmonds_greedy, enumerate_extreme_points

SAMPLER = "python-random-mt19937"
SAMPLE_CHUNK = 1000


@dataclass
class ShapleyResult:
    value: RateVector
    method: str
    oracle_calls: int
    sample_count: int | None = None
    seed: int | None = None
    rng: str | None = None
    extreme_point_mean: RateVector | None = None

    @property
    def mean_differs(self) -> bool:
        """True when the deduplicated extreme-point mean is not the Shapley value."""
        return self.extreme_point_mean is not None and self.extreme_point_mean != self.value


def shapley_weight_sums(table: Sequence[int], n: int) -> list[int]:
    """Integer kernel of the weighted-marginal formula.

    ``table[mask]`` holds integer-scaled coalition values.  Returns, per
    player, n! times the Shapley coordinate (still in the table's scale).
    """
    fact = [math.factorial(k) for k in range(n + 1)]
    # w[k] = k! (n-k-1)!: weight of a marginal contribution to a size-k coalition
    w = [fact[k] * fact[n - k - 1] for k in range(n)]
    acc = [0] * n
    size = [0] * (1 << n)
    for m in range(1, 1 << n):
        size[m] = size[m >> 1] + (m & 1)
    for m in range(1 << n):
        v = table[m]
        if not v:
            continue
        k = size[m]
        add = w[k - 1] * v if k else 0
        sub = w[k] * v if k < n else 0
        for i in range(n):
            if m >> i & 1:
                acc[i] += add
            else:
                acc[i] -= sub
    return acc


def shapley_from_table(values: Sequence[Fraction], n: int) -> RateVector:
    """Exact Shapley vector from the full table of coalition values."""
    denom = math.lcm(*(Fraction(v).denominator for v in values)) if values else 1
    table = [Fraction(v).numerator * (denom // Fraction(v).denominator) for v in values]
    acc = shapley_weight_sums(table, n)
    scale = math.factorial(n) * denom
    return RateVector(Fraction(a, scale) for a in acc)


def shapley_direct(oracle, force: bool = False) -> ShapleyResult:
    """Weighted average of marginal costs over all coalitions.

    Each of the 2^n coalitions is evaluated exactly once.
    """
    oracle = as_oracle(oracle)
    n = oracle.n
    check_cap(n, EXHAUSTIVE_CAP, "shapley_direct", force)
    before = root_oracle(oracle).ledger.total
    values = [oracle(m) for m in range(1 << n)]
    return ShapleyResult(shapley_from_table(values, n), "direct", root_oracle(oracle).ledger.total - before)


def shapley_by_permutations(oracle, force: bool = False) -> ShapleyResult:
    """Average of the greedy marginal vectors over all n! orders."""
    oracle = as_oracle(oracle)
    n = oracle.n
    check_cap(n, FACTORIAL_CAP, "shapley_by_permutations", force)
    before = root_oracle(oracle).ledger.total
    ex = enumerate_extreme_points(oracle, force=force)
    sums = [Fraction(0)] * n
    for r in ex.by_permutation.values():
        for i in range(n):
            sums[i] += r[i]
    k = math.factorial(n)
    value = RateVector(s / k for s in sums)
    return ShapleyResult(
        value,
        "permutationAverage",
        root_oracle(oracle).ledger.total - before,
        extreme_point_mean=ex.mean(),
    )


def _chunk_seed(seed: int, chunk: int) -> int:
    return seed * 1_000_003 + chunk


def _sample_chunk(oracle, n: int, count: int, seed: int) -> list[Fraction]:
    rng = random.Random(seed)
    sums = [Fraction(0)] * n
    perm = list(range(n))
    for _ in range(count):
        rng.shuffle(perm)
        r = edmonds_greedy(oracle, perm)
        for i in range(n):
            sums[i] += r[i]
    return sums


def shapley_sampled(oracle, sample_count: int, seed: int = 0, workers: int = 1) -> ShapleyResult:
    """Mean of greedy vectors over uniformly random orders.

    Samples are drawn in fixed-size chunks, each with a sub-seed derived from
    ``seed``, so the result does not depend on ``workers``.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    oracle = as_oracle(oracle)
    n = oracle.n
    before = root_oracle(oracle).ledger.total
    jobs = []
    remaining, chunk = sample_count, 0
    while remaining > 0:
        size = min(SAMPLE_CHUNK, remaining)
        jobs.append((size, _chunk_seed(seed, chunk)))
        remaining -= size
        chunk += 1
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda job: _sample_chunk(oracle, n, *job), jobs))
    else:
        parts = [_sample_chunk(oracle, n, *job) for job in jobs]
    sums = [sum(col, Fraction(0)) for col in zip(*parts)]
    value = RateVector(s / sample_count for s in sums)
    return ShapleyResult(value, "sampled", root_oracle(oracle).ledger.total - before, sample_count, seed, SAMPLER)

