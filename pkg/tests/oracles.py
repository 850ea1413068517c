"""Reference computations that avoid the package's bitmask code paths."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction


def coverage_entropy(model, players) -> Fraction:
    weights = dict(model.bits)
    seen = set()
    for p in players:
        seen |= set(model.observes[p])
    return sum((weights[b] for b in seen), Fraction(0))


def shapley_by_orders(model) -> list[Fraction]:
    n = model.n
    total = [Fraction(0)] * n
    for order in itertools.permutations(range(n)):
        before = []
        for p in order:
            total[p] += coverage_entropy(model, before + [p]) - coverage_entropy(model, before)
            before.append(p)
    k = math.factorial(n)
    return [t / k for t in total]


def greedy_vectors(model, players=None) -> set[tuple]:
    """Marginal vectors over all orders of ``players`` (coordinates sorted by player)."""
    players = sorted(range(model.n) if players is None else players)
    out = set()
    for order in itertools.permutations(players):
        r = {}
        before = []
        for p in order:
            r[p] = coverage_entropy(model, before + [p]) - coverage_entropy(model, before)
            before.append(p)
        out.add(tuple(r[p] for p in players))
    return out


def sharing_components(model) -> list[frozenset[int]]:
    """Players linked by a shared positive-weight bit, as connected components."""
    weights = dict(model.bits)
    parent = list(range(model.n))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    for i, j in itertools.combinations(range(model.n), 2):
        if any(weights[b] > 0 for b in model.observes[i] & model.observes[j]):
            parent[find(i)] = find(j)
    groups = {}
    for i in range(model.n):
        groups.setdefault(find(i), set()).add(i)
    return sorted((frozenset(g) for g in groups.values()), key=min)


def set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1 :]


def finest_by_enumeration(model) -> list[frozenset[int]]:
    """The decomposer with the most blocks; checked to refine every decomposer."""
    hv = coverage_entropy(model, range(model.n))
    decomposers = [
        [frozenset(b) for b in p]
        for p in set_partitions(range(model.n))
        if sum(coverage_entropy(model, b) for b in p) == hv
    ]
    best = max(decomposers, key=len)
    for d in decomposers:
        assert all(any(b <= c for c in d) for b in best)
    return sorted(best, key=min)
