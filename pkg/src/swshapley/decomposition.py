"""Finest decomposer of the entropy game and Shapley value by subgames."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import (
    EXHAUSTIVE_CAP,
    EntropyOracle,
    ModelError,
    OracleLedger,
    RateVector,
    as_mask,
    as_oracle,
    root_oracle,
    check_cap,
    format_coalition,
    full_mask,
    members,
    popcount,
    to_root_mask,
)
from .polyhedron import validate_permutation
from .shapley import ShapleyResult, shapley_direct


class PartitionError(ModelError):
    pass


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty blocks covering ``range(n)``, ordered by least member."""

    blocks: tuple[int, ...]
    n: int

    def __post_init__(self):
        blocks = tuple(as_mask(b) for b in self.blocks)
        seen = 0
        for b in blocks:
            if b == 0:
                raise PartitionError("empty block")
            if b & seen:
                raise PartitionError("blocks overlap")
            seen |= b
        if seen != full_mask(self.n):
            raise PartitionError(f"blocks cover {format_coalition(seen)}, not all {self.n} players")
        object.__setattr__(self, "blocks", tuple(sorted(blocks, key=lambda b: members(b)[0])))

    @classmethod
    def of(cls, blocks: Iterable[Iterable[int] | int], n: int) -> "Partition":
        return cls(tuple(as_mask(b) for b in blocks), n)

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def as_lists(self, one_based: bool = True) -> list[list[int]]:
        off = 1 if one_based else 0
        return [[i + off for i in members(b)] for b in self.blocks]

    def max_block_size(self) -> int:
        return max(popcount(b) for b in self.blocks)

    def refines(self, other: "Partition") -> bool:
        """Every block of ``self`` lies inside one block of ``other``."""
        return all(any(b & ~o == 0 for o in other.blocks) for b in self.blocks)

    def __str__(self) -> str:
        return "{" + ", ".join(format_coalition(b) for b in self.blocks) + "}"


@dataclass
class DecomposerResult:
    finest: Partition
    witness: RateVector
    oracle_calls: int
    trace: dict[int, int]

    @property
    def decomposable(self) -> bool:
        return len(self.finest) > 1


def is_decomposer(oracle, partition: Partition) -> bool:
    """True iff the block entropies add up to H(V)."""
    oracle = as_oracle(oracle)
    if partition.n != oracle.n:
        raise PartitionError("partition and oracle disagree on |V|")
    return sum((oracle(b) for b in partition.blocks), Fraction(0)) == oracle(full_mask(oracle.n))


def _merge_intersecting(sets: Sequence[int], n: int) -> Partition:
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for s in sets:
        ms = members(s)
        for j in ms[1:]:
            ri, rj = find(ms[0]), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    blocks: dict[int, int] = {}
    for i in range(n):
        blocks[find(i)] = blocks.get(find(i), 0) | 1 << i
    return Partition(tuple(blocks.values()), n)


def finest_decomposer(oracle, perm: Sequence[int] | None = None) -> DecomposerResult:
    """Greedy extreme point plus the finest decomposer, in O(n^2) evaluations.

    For each player in order, start from the prefix ending at that player and
    drop earlier players (latest first) whenever the remaining set stays
    tight, i.e. its rate sum equals its entropy.  What is left is the
    smallest tight set containing the player; intersecting ones are merged.
    ``trace`` maps each player to that smallest tight set.
    """
    oracle = as_oracle(oracle)
    n = oracle.n
    perm = validate_permutation(range(n) if perm is None else perm, n)
    before = root_oracle(oracle).ledger.total
    rates = [Fraction(0)] * n
    trace: dict[int, int] = {}
    first = perm[0]
    rates[first] = oracle(1 << first)
    trace[first] = 1 << first
    prefix = 1 << first
    for i in range(1, n):
        phi = perm[i]
        x = prefix | 1 << phi
        rates[phi] = oracle(x) - oracle(prefix)
        for j in range(1, i + 1):
            cand = x & ~(1 << perm[i - j])
            if sum((rates[k] for k in members(cand)), Fraction(0)) == oracle(cand):
                x = cand
        trace[phi] = x
        prefix |= 1 << phi
    finest = _merge_intersecting(list(trace.values()), n)
    return DecomposerResult(finest, RateVector(rates), root_oracle(oracle).ledger.total - before, trace)


def direct_sum(parts: Iterable[tuple[int | Iterable[int], Sequence]], n: int | None = None) -> RateVector:
    """Place each part's coordinates at its coalition's players.

    ``parts`` are ``(coalition, rates)`` pairs with rates listed in increasing
    player order.  When ``n`` is omitted the parts must cover 0..max player.
    """
    parts = [(as_mask(c), list(r)) for c, r in parts]
    seen = 0
    for c, r in parts:
        if c & seen:
            raise PartitionError("direct sum of overlapping coalitions")
        if popcount(c) != len(r):
            raise PartitionError(f"coalition {format_coalition(c)} has {len(r)} rates")
        seen |= c
    if n is None:
        n = seen.bit_length()
    if seen != full_mask(n):
        raise PartitionError(f"parts cover {format_coalition(seen)}, not all {n} players")
    out = [Fraction(0)] * n
    for c, r in parts:
        for i, v in zip(members(c), r):
            out[i] = Fraction(v)
    return RateVector(out)


def shapley_decomposed(
    oracle,
    perm: Sequence[int] | None = None,
    parallel: bool = False,
    workers: int | None = None,
) -> tuple[ShapleyResult, DecomposerResult]:
    """Shapley value as the direct sum of subgame Shapley values.

    Decomposition-search evaluations go to the ``decompose`` phase and each subgame's
    to ``subgame:<k>``.
    """
    oracle = as_oracle(oracle)
    before = root_oracle(oracle).ledger.total
    with oracle.phase("decompose"):
        dec = finest_decomposer(oracle, perm)
    check_cap(dec.finest.max_block_size(), EXHAUSTIVE_CAP, "shapley_decomposed")

    def solve(job):
        k, block = job
        with oracle.phase(f"subgame:{k}"):
            return shapley_direct(oracle.restricted(block)).value

    jobs = list(enumerate(dec.finest.blocks))
    if parallel and len(jobs) > 1:
        # phases are per-oracle state, so each worker charges its own sub-oracle
        values = _solve_parallel(oracle, jobs, workers)
    else:
        values = [solve(job) for job in jobs]
    value = direct_sum(zip(dec.finest.blocks, values), oracle.n)
    return ShapleyResult(value, "decomposed", root_oracle(oracle).ledger.total - before), dec


def _solve_parallel(oracle, jobs, workers):
    root = root_oracle(oracle)

    def solve(job):
        k, block = job
        local = EntropyOracle(root.model, OracleLedger(), root.memoize)
        with local.phase(f"subgame:{k}"):
            value = shapley_direct(local.restricted(to_root_mask(oracle, block))).value
        return value, local

    with ThreadPoolExecutor(workers) as pool:
        results = list(pool.map(solve, jobs))
    for _, local in results:
        root.ledger.merge(local.ledger)
        root.distinct |= local.distinct
    return [v for v, _ in results]


def core_dimension(oracle, perm: Sequence[int] | None = None) -> int:
    """|V| - |P*|."""
    oracle = as_oracle(oracle)
    return oracle.n - len(finest_decomposer(oracle, perm).finest)

