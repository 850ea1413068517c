"""Achievable-region geometry: membership tests and greedy extreme points."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .core import (
    EXHAUSTIVE_CAP,
    FACTORIAL_CAP,
    ModelError,
    RateVector,
    as_oracle,
    check_cap,
    dual_entropy,
    full_mask,
    ordered_subsets,
)


@dataclass
class Violation:
    coalition: int
    bound: Fraction
    actual: Fraction


@dataclass
class MembershipReport:
    is_member: bool
    violated: Violation | None = None
    tight_sets: list[int] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.is_member


def _as_rates(oracle, rates) -> RateVector:
    rates = RateVector(rates)
    if len(rates) != oracle.n:
        raise ModelError(f"rate vector has {len(rates)} entries for {oracle.n} players")
    return rates


def _tight_sets(oracle, rates: RateVector) -> list[int]:
    return [m for m in ordered_subsets(oracle.n, include_empty=True) if rates.sum_over(m) == oracle(m)]


def _lower_bound_check(oracle, rates, bound_fn, relaxed: bool) -> MembershipReport:
    v = full_mask(oracle.n)
    violated = None
    for m in ordered_subsets(oracle.n):
        if m == v:
            continue
        bound = bound_fn(m)
        actual = rates.sum_over(m)
        if actual < bound:
            violated = Violation(m, bound, actual)
            break
    if violated is None:
        hv, actual = oracle(v), rates.sum_over(v)
        if actual < hv or (actual != hv and not relaxed):
            violated = Violation(v, hv, actual)
    return MembershipReport(violated is None, violated, _tight_sets(oracle, rates))


def check_slepian_wolf(oracle, rates, relaxed: bool = False, force: bool = False) -> MembershipReport:
    """Lower-bound form: r(X) >= H(X | V\\X) for X a proper subset, r(V) = H(V).

    ``relaxed`` accepts r(V) >= H(V); decomposition results do not carry over
    to that region.
    """
    oracle = as_oracle(oracle)
    check_cap(oracle.n, EXHAUSTIVE_CAP, "check_slepian_wolf", force)
    rates = _as_rates(oracle, rates)
    v = full_mask(oracle.n)
    hv = oracle(v)
    return _lower_bound_check(oracle, rates, lambda m: hv - oracle(v & ~m), relaxed)


def check_core(oracle, rates, force: bool = False) -> MembershipReport:
    """Upper-bound form: r(X) <= H(X) for every X, with r(V) = H(V)."""
    oracle = as_oracle(oracle)
    check_cap(oracle.n, EXHAUSTIVE_CAP, "check_core", force)
    rates = _as_rates(oracle, rates)
    v = full_mask(oracle.n)
    violated = None
    for m in ordered_subsets(oracle.n):
        bound, actual = oracle(m), rates.sum_over(m)
        if actual > bound or (m == v and actual != bound):
            violated = Violation(m, bound, actual)
            break
    return MembershipReport(violated is None, violated, _tight_sets(oracle, rates))


def check_dual_base(oracle, rates, relaxed: bool = False, force: bool = False) -> MembershipReport:
    """Dual form: r(X) >= H#(X) for every X, with r(V) = H(V)."""
    oracle = as_oracle(oracle)
    check_cap(oracle.n, EXHAUSTIVE_CAP, "check_dual_base", force)
    rates = _as_rates(oracle, rates)
    return _lower_bound_check(oracle, rates, lambda m: dual_entropy(oracle, m), relaxed)


CHECKS = {"sw": check_slepian_wolf, "core": check_core, "dual": check_dual_base}


def validate_permutation(perm: Sequence[int], n: int) -> tuple[int, ...]:
    perm = tuple(perm)
    if sorted(perm) != list(range(n)):
        raise ModelError(f"{perm} is not a permutation of 0..{n - 1}")
    return perm


def edmonds_greedy(oracle, perm: Sequence[int]) -> RateVector:
    """Marginal vector r[perm[k]] = H(perm[:k+1]) - H(perm[:k])."""
    oracle = as_oracle(oracle)
    perm = validate_permutation(perm, oracle.n)
    rates = [Fraction(0)] * oracle.n
    prefix = 0
    prev = oracle(0)
    for p in perm:
        prefix |= 1 << p
        cur = oracle(prefix)
        rates[p] = cur - prev
        prev = cur
    return RateVector(rates)


@dataclass
class ExtremePointSet:
    points: list[RateVector]
    by_permutation: dict[tuple[int, ...], RateVector]

    def __len__(self) -> int:
        return len(self.points)

    def mean(self) -> RateVector:
        k = len(self.points)
        return RateVector(sum(col, Fraction(0)) / k for col in zip(*self.points))


def enumerate_extreme_points(oracle, force: bool = False) -> ExtremePointSet:
    """Greedy vectors of all n! orders, deduplicated in order of first appearance."""
    oracle = as_oracle(oracle)
    check_cap(oracle.n, FACTORIAL_CAP, "enumerate_extreme_points", force)
    by_perm = {}
    seen = {}
    for perm in itertools.permutations(range(oracle.n)):
        r = edmonds_greedy(oracle, perm)
        by_perm[perm] = r
        seen.setdefault(r, None)
    return ExtremePointSet(list(seen), by_perm)
