"""Ground-set arithmetic, the bit-coverage entropy model and the counting oracle.

Coalitions are plain ``int`` bitmasks over 0-based player indices; bit ``i``
set means player ``i`` is in the coalition.  All scalars are
:class:`fractions.Fraction` so tightness and membership tests are exact.
"""

from __future__ import annotations

import contextlib
import itertools
import math
import threading
import warnings
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

MAX_PLAYERS = 64
EXHAUSTIVE_CAP = 24
FACTORIAL_CAP = 9


class ModelError(ValueError):
    """Malformed model, coalition or rate vector."""


class CapExceededError(ValueError):
    """Ground set too large for an exhaustive computation."""


def check_cap(n: int, cap: int, what: str, force: bool = False) -> None:
    if n <= cap:
        return
    if not force:
        raise CapExceededError(f"{what} refuses |V|={n} > {cap}; pass force=True to override")
    warnings.warn(f"{what} forced on |V|={n} above cap {cap}", RuntimeWarning, stacklevel=3)


# -- coalitions ---------------------------------------------------------------


def full_mask(n: int) -> int:
    return (1 << n) - 1


def mask_of(players: Iterable[int]) -> int:
    mask = 0
    for i in players:
        if i < 0:
            raise ModelError(f"negative player index {i}")
        mask |= 1 << i
    return mask


def members(mask: int) -> list[int]:
    """Sorted player indices in ``mask``."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def is_subset(a: int, b: int) -> bool:
    return a & ~b == 0


def ordered_subsets(n: int, include_empty: bool = False) -> Iterator[int]:
    """Subsets of ``range(n)`` by increasing cardinality, then lexicographically."""
    for k in range(0 if include_empty else 1, n + 1):
        for combo in itertools.combinations(range(n), k):
            yield mask_of(combo)


def as_mask(coalition: int | Iterable[int]) -> int:
    if isinstance(coalition, int):
        return coalition
    return mask_of(coalition)


def format_coalition(mask: int, one_based: bool = True) -> str:
    off = 1 if one_based else 0
    return "{" + ",".join(str(i + off) for i in members(mask)) + "}"


# -- rate vectors -------------------------------------------------------------


class RateVector(tuple):
    """Exact per-player coding rates, indexed by 0-based player."""

    def __new__(cls, rates: Iterable = ()):
        return super().__new__(cls, (Fraction(r) for r in rates))

    def sum_over(self, mask: int) -> Fraction:
        total = Fraction(0)
        for i in members(mask):
            if i >= len(self):
                raise ModelError(f"player {i} outside rate vector of length {len(self)}")
            total += self[i]
        return total

    def total(self) -> Fraction:
        return sum(self, Fraction(0))

    def __repr__(self) -> str:
        return "RateVector(" + ", ".join(str(r) for r in self) + ")"


def parse_rates(text: str) -> RateVector:
    """Parse ``"1,9/5,2"`` into a :class:`RateVector`."""
    try:
        return RateVector(Fraction(tok.strip()) for tok in text.split(",") if tok.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ModelError(f"bad rate vector {text!r}: {exc}") from None


# -- entropy models -----------------------------------------------------------


@dataclass(frozen=True)
class BitSourceModel:
    """Players observing subsets of independent weighted bits.

    The joint entropy of a coalition is the total weight of the bits seen by
    at least one of its members.  ``origin`` maps local player indices to the
    indices of the model this one was restricted from (identity otherwise).
    """

    n: int
    bits: tuple[tuple[str, Fraction], ...]
    observes: tuple[frozenset[str], ...]
    origin: tuple[int, ...] = ()
    allow_negative: bool = False
    _bit_masks: tuple[int, ...] = field(init=False, repr=False, compare=False)
    _scaled: tuple[int, ...] = field(init=False, repr=False, compare=False)
    _denom: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 1 <= self.n <= MAX_PLAYERS:
            raise ModelError(f"player count {self.n} outside 1..{MAX_PLAYERS}")
        bits = tuple((str(b), Fraction(w)) for b, w in self.bits)
        ids = [b for b, _ in bits]
        if len(set(ids)) != len(ids):
            raise ModelError("duplicate bit ids")
        if not self.allow_negative and any(w < 0 for _, w in bits):
            raise ModelError("bit weights must be nonnegative")
        observes = tuple(frozenset(map(str, obs)) for obs in self.observes)
        if len(observes) != self.n:
            raise ModelError(f"observes has {len(observes)} entries for {self.n} players")
        index = {b: k for k, b in enumerate(ids)}
        masks = []
        for i, obs in enumerate(observes):
            unknown = obs - index.keys()
            if unknown:
                raise ModelError(f"player {i + 1} observes unknown bits {sorted(unknown)}")
            masks.append(mask_of(index[b] for b in obs))
        origin = tuple(self.origin) if self.origin else tuple(range(self.n))
        if len(origin) != self.n:
            raise ModelError("origin map length differs from player count")
        denom = math.lcm(*(w.denominator for _, w in bits)) if bits else 1
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "observes", observes)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "_bit_masks", tuple(masks))
        object.__setattr__(self, "_scaled", tuple(w.numerator * (denom // w.denominator) for _, w in bits))
        object.__setattr__(self, "_denom", denom)

    def entropy(self, mask: int) -> Fraction:
        if mask >> self.n:
            raise ModelError(f"coalition {format_coalition(mask)} outside ground set of {self.n}")
        covered = 0
        i = 0
        m = mask
        while m:
            if m & 1:
                covered |= self._bit_masks[i]
            m >>= 1
            i += 1
        total = 0
        k = 0
        while covered:
            if covered & 1:
                total += self._scaled[k]
            covered >>= 1
            k += 1
        return Fraction(total, self._denom)

    def weight(self, bit_id: str) -> Fraction:
        return dict(self.bits)[bit_id]

    def scaled(self, factor: Fraction) -> "BitSourceModel":
        factor = Fraction(factor)
        return BitSourceModel(
            self.n,
            tuple((b, w * factor) for b, w in self.bits),
            self.observes,
            self.origin,
            self.allow_negative,
        )


@dataclass(frozen=True)
class TableModel:
    """Set function given explicitly as ``values[mask]`` for every coalition."""

    n: int
    values: tuple[Fraction, ...]
    origin: tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.values) != 1 << self.n:
            raise ModelError(f"table needs {1 << self.n} values, got {len(self.values)}")
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))
        if not self.origin:
            object.__setattr__(self, "origin", tuple(range(self.n)))

    def entropy(self, mask: int) -> Fraction:
        if mask >> self.n:
            raise ModelError(f"coalition {format_coalition(mask)} outside ground set of {self.n}")
        return self.values[mask]


def restrict_model(model, coalition: int | Iterable[int]):
    """Subgame model on the players of ``coalition``, reindexed 0..|C|-1.

    The returned model's ``origin`` holds the global index of each local
    player, so results can be placed back with :func:`direct_sum`.
    """
    mask = as_mask(coalition)
    if mask == 0:
        raise ModelError("cannot restrict to the empty coalition")
    if mask >> model.n:
        raise ModelError(f"coalition {format_coalition(mask)} outside ground set")
    local = members(mask)
    origin = tuple(model.origin[i] for i in local)
    if isinstance(model, BitSourceModel):
        obs = [model.observes[i] for i in local]
        seen = set().union(*obs)
        bits = tuple((b, w) for b, w in model.bits if b in seen)
        return BitSourceModel(len(local), bits, tuple(obs), origin, model.allow_negative)
    values = []
    for sub in range(1 << len(local)):
        values.append(model.entropy(mask_of(local[k] for k in members(sub))))
    return TableModel(len(local), tuple(values), origin)


# -- oracle and ledger --------------------------------------------------------


class OracleLedger:
    """Thread-safe per-phase counters of entropy evaluations."""

    def __init__(self):
        self._lock = threading.Lock()
        self.counts: Counter[str] = Counter()

    def add(self, phase: str, k: int = 1) -> None:
        if k < 0:
            raise ValueError("ledger counts never decrease")
        with self._lock:
            self.counts[phase] += k

    def merge(self, other: "OracleLedger") -> None:
        with self._lock:
            self.counts.update(other.counts)

    def __getitem__(self, phase: str) -> int:
        return self.counts.get(phase, 0)

    @property
    def total(self) -> int:
        return sum(self.counts.values())


class EntropyOracle:
    """Counting wrapper around a model's ``entropy``.

    Every evaluation is charged to the active phase.  With memoization on, a
    coalition is charged once per phase; with it off, every call is charged.
    ``distinct`` collects every coalition touched in any phase.
    """

    def __init__(self, model, ledger: OracleLedger | None = None, memoize: bool = True):
        self.model = model
        self.n = model.n
        self.ledger = ledger if ledger is not None else OracleLedger()
        self.memoize = memoize
        self.phase_label = "default"
        self._cache: dict[int, Fraction] = {}
        self._charged: dict[str, set[int]] = {}
        self.distinct: set[int] = set()
        self._lock = threading.Lock()

    def __call__(self, coalition: int | Iterable[int]) -> Fraction:
        mask = as_mask(coalition)
        value = self._cache.get(mask)
        if value is None:
            value = self.model.entropy(mask)
        with self._lock:
            self._cache[mask] = value
            self.distinct.add(mask)
            charged = self._charged.setdefault(self.phase_label, set())
            if not self.memoize or mask not in charged:
                charged.add(mask)
                self.ledger.add(self.phase_label)
        return value

    evaluate = __call__

    @contextlib.contextmanager
    def phase(self, label: str, memoize: bool | None = None):
        prev_label, prev_memo = self.phase_label, self.memoize
        self.phase_label = label
        if memoize is not None:
            self.memoize = memoize
        try:
            yield self
        finally:
            self.phase_label, self.memoize = prev_label, prev_memo

    @property
    def calls(self) -> int:
        return self.ledger.total

    def restricted(self, coalition: int | Iterable[int]) -> "SubgameOracle":
        return SubgameOracle(self, as_mask(coalition))


class SubgameOracle:
    """View of a parent oracle on the players of one coalition.

    Local masks are translated to global ones so the parent's ledger and
    ``distinct`` set see every evaluation.
    """

    def __init__(self, parent, mask: int):
        if mask == 0:
            raise ModelError("cannot restrict to the empty coalition")
        self.parent = parent
        self.global_players = members(mask)
        self.n = len(self.global_players)
        self.mask = mask

    def to_global(self, local_mask: int) -> int:
        out = 0
        for k in members(local_mask):
            out |= 1 << self.global_players[k]
        return out

    def __call__(self, coalition: int | Iterable[int]) -> Fraction:
        local = as_mask(coalition)
        if local >> self.n:
            raise ModelError(f"coalition outside subgame of {self.n} players")
        return self.parent(self.to_global(local))

    def phase(self, label: str, memoize: bool | None = None):
        return self.parent.phase(label, memoize)

    def restricted(self, coalition: int | Iterable[int]) -> "SubgameOracle":
        return SubgameOracle(self, as_mask(coalition))


def root_oracle(oracle) -> EntropyOracle:
    while isinstance(oracle, SubgameOracle):
        oracle = oracle.parent
    return oracle


def to_root_mask(oracle, mask: int) -> int:
    while isinstance(oracle, SubgameOracle):
        mask = oracle.to_global(mask)
        oracle = oracle.parent
    return mask


def as_oracle(source) -> EntropyOracle:
    if isinstance(source, (EntropyOracle, SubgameOracle)):
        return source
    return EntropyOracle(source)


# -- information measures -----------------------------------------------------


def entropy(oracle, coalition) -> Fraction:
    return as_oracle(oracle)(coalition)


def conditional_entropy(oracle, x, y) -> Fraction:
    """H(X | Y) = H(X u Y) - H(Y)."""
    oracle = as_oracle(oracle)
    x, y = as_mask(x), as_mask(y)
    return oracle(x | y) - oracle(y)


def mutual_information(oracle, x, y) -> Fraction:
    """H(X) + H(Y) - H(X u Y), as written for arbitrary X, Y."""
    oracle = as_oracle(oracle)
    x, y = as_mask(x), as_mask(y)
    return oracle(x) + oracle(y) - oracle(x | y)


def dual_entropy(oracle, x) -> Fraction:
    """H#(X) = H(V) - H(V \\ X); supermodular."""
    oracle = as_oracle(oracle)
    v = full_mask(oracle.n)
    x = as_mask(x)
    return oracle(v) - oracle(v & ~x)


@dataclass
class PolymatroidReport:
    ok: bool
    failure: str | None = None
    witness: tuple[int, int] | None = None

    def __bool__(self) -> bool:
        return self.ok


def verify_polymatroid(model, force: bool = False) -> PolymatroidReport:
    """Exhaustively check normalization, monotonicity and submodularity.

    Submodularity is tested in its diminishing-returns form
    H(X+i) + H(X+j) >= H(X+i+j) + H(X), which is equivalent to the
    all-pairs inequality and needs O(2^n n^2) evaluations instead of 4^n.
    The witness is the offending pair (X, Y) as masks.
    """
    n = model.n
    check_cap(n, EXHAUSTIVE_CAP, "verify_polymatroid", force)
    h = [model.entropy(m) for m in range(1 << n)]
    if h[0] != 0:
        return PolymatroidReport(False, "normalization", (0, 0))
    for m in ordered_subsets(n, include_empty=True):
        for i in range(n):
            if m >> i & 1:
                continue
            if h[m | 1 << i] < h[m]:
                return PolymatroidReport(False, "monotonicity", (m, m | 1 << i))
    for m in ordered_subsets(n, include_empty=True):
        free = [i for i in range(n) if not m >> i & 1]
        for i, j in itertools.combinations(free, 2):
            a, b = m | 1 << i, m | 1 << j
            if h[a] + h[b] < h[a | b] + h[m]:
                return PolymatroidReport(False, "submodularity", (a, b))
    return PolymatroidReport(True)


# -- instance files -----------------------------------------------------------


def model_from_dict(data: Mapping) -> BitSourceModel:
    """Build a model from the instance JSON structure (1-based player keys)."""
    try:
        n = int(data["players"])
        bits = []
        for entry in data["bits"]:
            w = entry["weight"]
            if isinstance(w, (list, tuple)):
                num, den = w
                if int(den) <= 0:
                    raise ModelError(f"bit {entry['id']!r} has nonpositive denominator")
                weight = Fraction(int(num), int(den))
            else:
                weight = Fraction(str(w))
            bits.append((str(entry["id"]), weight))
        obs_raw = data.get("observes", {})
        observes = []
        for label in range(1, n + 1):
            observes.append(frozenset(obs_raw.get(str(label), ())))
        extra = set(obs_raw) - {str(k) for k in range(1, n + 1)}
        if extra:
            raise ModelError(f"observes names unknown players {sorted(extra)}")
    except (KeyError, TypeError) as exc:
        raise ModelError(f"malformed instance: {exc!r}") from None
    return BitSourceModel(n, tuple(bits), tuple(observes))


def model_to_dict(model: BitSourceModel, planted: Sequence[int] | None = None) -> dict:
    data = {
        "players": model.n,
        "bits": [
            {"id": b, "weight": [w.numerator, w.denominator]} for b, w in model.bits
        ],
        "observes": {
            str(i + 1): sorted(obs) for i, obs in enumerate(model.observes)
        },
    }
    if planted is not None:
        data["planted"] = [[i + 1 for i in members(block)] for block in planted]
    return data


def load_instance(path) -> BitSourceModel:
    import json

    with open(path) as fh:
        return model_from_dict(json.load(fh))


def planted_partition(path) -> list[int] | None:
    import json

    with open(path) as fh:
        data = json.load(fh)
    if "planted" not in data:
        return None
    return [mask_of(i - 1 for i in block) for block in data["planted"]]


def dump_instance(model: BitSourceModel, path, planted: Sequence[int] | None = None) -> None:
    import json

    text = json.dumps(model_to_dict(model, planted), indent=2) + "\n"
    with open(path, "w") as fh:
        fh.write(text)


def load_fixture(name: str) -> BitSourceModel:
    """Load one of the bundled instances: ``example1``, ``independent``,
    ``decomposable`` or ``two_terminal``."""
    import json
    from importlib import resources

    text = resources.files("swshapley.data").joinpath(f"{name}.json").read_text()
    return model_from_dict(json.loads(text))
