"""Random bit-coverage instances with a planted block structure."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .core import BitSourceModel, EntropyOracle, ModelError, full_mask, mask_of


class GenerationError(ModelError):
    pass


@dataclass(frozen=True)
class GenSpec:
    players: int
    target_total_entropy: Fraction = Fraction(50)
    block_count: int | str = "random"
    bits_per_block: tuple[int, int] = (1, 2)
    weight_range: tuple[Fraction, Fraction] = (Fraction(1, 10), Fraction(1))
    max_denominator: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.players < 1:
            raise GenerationError("players must be >= 1")
        if Fraction(self.target_total_entropy) <= 0:
            raise GenerationError("target total entropy must be positive")
        lo, hi = self.bits_per_block
        if not 0 <= lo <= hi:
            raise GenerationError(f"empty bits-per-block range {self.bits_per_block}")
        wlo, whi = (Fraction(w) for w in self.weight_range)
        if not 0 < wlo <= whi:
            raise GenerationError(f"bad weight range {self.weight_range}")
        if self.max_denominator < 1:
            raise GenerationError("max_denominator must be >= 1")


@dataclass
class GeneratedInstance:
    model: BitSourceModel
    planted: list[int]


def _weight(rng: random.Random, spec: GenSpec) -> Fraction:
    lo, hi = (Fraction(w) for w in spec.weight_range)
    choices = set()
    for den in range(1, spec.max_denominator + 1):
        for num in range(int(lo * den), int(hi * den) + 1):
            f = Fraction(num, den)
            if lo <= f <= hi:
                choices.add(f)
    return rng.choice(sorted(choices))


def _block_count(rng: random.Random, spec: GenSpec) -> int:
    n = spec.players
    if spec.block_count == "random":
        return 1 if n == 1 else rng.randint(2, max(2, n // 2))
    k = int(spec.block_count)
    if not 1 <= k <= n:
        raise GenerationError(f"block count {k} infeasible for {n} players")
    return k


def _split(rng: random.Random, n: int, k: int) -> list[list[int]]:
    players = list(range(n))
    rng.shuffle(players)
    blocks = [[p] for p in players[:k]]
    for p in players[k:]:
        rng.choice(blocks).append(p)
    return [sorted(b) for b in blocks]


def _fill_block(rng, spec, block, prefix, bits, observes):
    """Bits for one block: a chain of shared bits linking consecutive members,
    a private bit each, and ``bits_per_block`` extra bits on random subsets."""
    order = block[:]
    rng.shuffle(order)
    count = 0

    def new_bit(holders):
        nonlocal count
        bit_id = f"{prefix}{count}"
        count += 1
        bits.append((bit_id, _weight(rng, spec)))
        for p in holders:
            observes[p].add(bit_id)

    for a, b in zip(order, order[1:]):
        new_bit((a, b))
    for p in order:
        new_bit((p,))
    for _ in range(rng.randint(*spec.bits_per_block)):
        size = rng.randint(1, len(block))
        new_bit(rng.sample(block, size))


def _normalize(model: BitSourceModel, target: Fraction) -> BitSourceModel:
    total = model.entropy(full_mask(model.n))
    return model.scaled(Fraction(target) / total)


def generate_decomposable(spec: GenSpec) -> GeneratedInstance:
    """Instance whose planted blocks share no bits, rescaled to the target H(V).

    Every block of size >= 2 is internally connected by shared bits, so the
    finest decomposer refines the planted partition.
    """
    rng = random.Random(spec.seed)
    k = _block_count(rng, spec)
    blocks = _split(rng, spec.players, k)
    bits: list[tuple[str, Fraction]] = []
    observes = [set() for _ in range(spec.players)]
    for b, block in enumerate(blocks):
        _fill_block(rng, spec, block, f"b{b}_", bits, observes)
    model = BitSourceModel(spec.players, tuple(bits), tuple(frozenset(o) for o in observes))
    model = _normalize(model, spec.target_total_entropy)
    planted = sorted((mask_of(b) for b in blocks), key=lambda m: (m & -m))
    return GeneratedInstance(model, planted)


def generate_indecomposable(spec: GenSpec, retries: int = 20) -> GeneratedInstance:
    """Instance with one connected block spanning all players, checked by
    running the finest-decomposer search on it."""
    from .decomposition import finest_decomposer

    if spec.players < 2:
        raise GenerationError("an indecomposable instance needs at least 2 players")
    for attempt in range(retries):
        rng = random.Random(spec.seed * 7919 + attempt)
        bits: list[tuple[str, Fraction]] = []
        observes = [set() for _ in range(spec.players)]
        _fill_block(rng, spec, list(range(spec.players)), "x", bits, observes)
        model = BitSourceModel(spec.players, tuple(bits), tuple(frozenset(o) for o in observes))
        model = _normalize(model, spec.target_total_entropy)
        if len(finest_decomposer(EntropyOracle(model)).finest) == 1:
            return GeneratedInstance(model, [full_mask(spec.players)])
    raise GenerationError(f"no indecomposable instance after {retries} attempts")
