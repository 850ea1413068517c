"""Oracle-call and completion-time experiments on generated decomposable games."""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .core import EXHAUSTIVE_CAP, EntropyOracle, full_mask, members, popcount
from .decomposition import shapley_decomposed
from .generate import GenSpec, generate_decomposable
from .shapley import shapley_direct, shapley_weight_sums

log = logging.getLogger(__name__)

CSV_FIELDS = [
    "players",
    "clusterId",
    "directCalls",
    "decomposedCalls",
    "directTimeSec",
    "decomposedTimeSec",
    "maxBlockSize",
]
EXTRA_FIELDS = ["decomposedCallsRaw", "blocks", "plantedBlocks", "skipped", "regression"]


@dataclass
class BenchRow:
    players: int
    clusterId: int
    directCalls: int = 0
    decomposedCalls: int = 0
    directTimeSec: float = 0.0
    decomposedTimeSec: float = 0.0
    maxBlockSize: int = 0
    decomposedCallsRaw: int = 0
    blocks: int = 0
    plantedBlocks: int = 0
    skipped: bool = False
    regression: bool = False


@dataclass
class BenchConfig:
    sizes: Sequence[int] = tuple(range(5, 16))
    clusters: int = 20
    total: Fraction = Fraction(50)
    seed: int = 0
    blocks: int | str = "random"
    workers: int | None = None
    repeats: int = 5
    cap: int = EXHAUSTIVE_CAP
    extra: dict = field(default_factory=dict)

    def resolved_workers(self) -> int:
        return self.workers or os.cpu_count() or 1


def cell_seed(seed: int, players: int, cluster: int) -> int:
    return (seed * 1009 + players) * 1013 + cluster


def _instance(config: BenchConfig, players: int, cluster: int):
    spec = GenSpec(
        players=players,
        target_total_entropy=Fraction(config.total),
        block_count=config.blocks,
        seed=cell_seed(config.seed, players, cluster),
    )
    return generate_decomposable(spec)


def _calls_cell(args) -> BenchRow:
    config, players, cluster = args
    row = BenchRow(players, cluster)
    if players > config.cap:
        row.skipped = True
        return row
    inst = _instance(config, players, cluster)
    row.plantedBlocks = len(inst.planted)

    # direct: one pass over every coalition, memoization off
    direct_oracle = EntropyOracle(inst.model)
    t0 = time.perf_counter()
    with direct_oracle.phase("direct", memoize=False):
        direct = shapley_direct(direct_oracle)
    row.directTimeSec = time.perf_counter() - t0
    row.directCalls = direct.oracle_calls

    dec_oracle = EntropyOracle(inst.model)
    t0 = time.perf_counter()
    decomposed, dec = shapley_decomposed(dec_oracle)
    row.decomposedTimeSec = time.perf_counter() - t0
    row.decomposedCallsRaw = decomposed.oracle_calls
    row.decomposedCalls = len(dec_oracle.distinct)
    row.maxBlockSize = dec.finest.max_block_size()
    row.blocks = len(dec.finest)
    row.regression = decomposed.value != direct.value
    if row.regression:
        log.error("Shapley mismatch at |V|=%d cluster %d", players, cluster)
    return row


def _run_cells(fn, cells, workers: int) -> list[BenchRow]:
    if workers <= 1:
        return [fn(c) for c in cells]
    with ProcessPoolExecutor(workers) as pool:
        return list(pool.map(fn, cells))


def run_oracle_count_experiment(config: BenchConfig | None = None) -> list[BenchRow]:
    """Oracle calls of the direct formula vs. decomposition plus subgames.

    ``decomposedCalls`` counts distinct coalitions evaluated across the
    decomposition search and all subgames; ``decomposedCallsRaw`` sums the
    per-phase counts without sharing between phases.
    """
    config = config or BenchConfig()
    cells = [(config, n, c) for n in config.sizes for c in range(config.clusters)]
    return _run_cells(_calls_cell, cells, config.resolved_workers())


# -- completion time ----------------------------------------------------------


def _scaled_table(values: Sequence[Fraction]) -> tuple[list[int], int]:
    denom = math.lcm(*(v.denominator for v in values))
    return [v.numerator * (denom // v.denominator) for v in values], denom


def _block_table(model, block: int) -> list[Fraction]:
    players = members(block)
    out = []
    for sub in range(1 << len(players)):
        mask = 0
        for k in members(sub):
            mask |= 1 << players[k]
        out.append(model.entropy(mask))
    return out


def _median_time(fn, repeats: int) -> float:
    fn()  # warmup, discarded
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def _timing_cell(config: BenchConfig, players: int, cluster: int, pool) -> BenchRow:
    row = BenchRow(players, cluster)
    if players > config.cap:
        row.skipped = True
        return row
    inst = _instance(config, players, cluster)
    model = inst.model
    row.plantedBlocks = len(inst.planted)
    oracle = EntropyOracle(model)
    direct = shapley_direct(oracle)
    decomposed, dec = shapley_decomposed(EntropyOracle(model))
    row.directCalls = direct.oracle_calls
    row.decomposedCalls = decomposed.oracle_calls
    row.maxBlockSize = dec.finest.max_block_size()
    row.blocks = len(dec.finest)
    row.regression = decomposed.value != direct.value

    # prememoized tables: timing excludes oracle evaluation
    full, _ = _scaled_table([oracle(m) for m in range(1 << players)])
    tables = [(_scaled_table(_block_table(model, b))[0], popcount(b)) for b in dec.finest.blocks]

    row.directTimeSec = _median_time(lambda: shapley_weight_sums(full, players), config.repeats)

    def parallel():
        futures = [pool.submit(shapley_weight_sums, t, k) for t, k in tables]
        return [f.result() for f in futures]

    row.decomposedTimeSec = _median_time(parallel, config.repeats)
    return row


def run_parallel_timing_experiment(config: BenchConfig | None = None) -> list[BenchRow]:
    """Median completion time of the direct formula vs. subgames solved in a
    worker pool, both from prememoized coalition tables.

    Cells run one at a time so timings do not interfere.
    """
    config = config or BenchConfig()
    rows = []
    with ThreadPoolExecutor(config.resolved_workers()) as pool:
        for n in config.sizes:
            for c in range(config.clusters):
                rows.append(_timing_cell(config, n, c, pool))
    return rows


# -- reporting ----------------------------------------------------------------


def aggregate(rows: Sequence[BenchRow]) -> list[dict]:
    """Per-|V| means over non-skipped rows, plus median times."""
    out = []
    for n in sorted({r.players for r in rows}):
        group = [r for r in rows if r.players == n and not r.skipped]
        if not group:
            continue
        out.append(
            {
                "players": n,
                "clusters": len(group),
                "meanDirectCalls": statistics.fmean(r.directCalls for r in group),
                "meanDecomposedCalls": statistics.fmean(r.decomposedCalls for r in group),
                "meanDecomposedCallsRaw": statistics.fmean(r.decomposedCallsRaw for r in group),
                "meanDirectTimeSec": statistics.fmean(r.directTimeSec for r in group),
                "meanDecomposedTimeSec": statistics.fmean(r.decomposedTimeSec for r in group),
                "medianDirectTimeSec": statistics.median(r.directTimeSec for r in group),
                "medianDecomposedTimeSec": statistics.median(r.decomposedTimeSec for r in group),
                "meanMaxBlockSize": statistics.fmean(r.maxBlockSize for r in group),
            }
        )
    return out


def emit_report(
    rows: Sequence[BenchRow],
    path,
    kind: str = "calls",
    config: BenchConfig | None = None,
    figure: bool = True,
) -> dict[str, Path]:
    """Write the per-row CSV, the per-|V| aggregate CSV, a metadata JSON and
    (optionally) a PNG figure next to ``path``.  Returns the written paths."""
    if not rows:
        raise ValueError("no rows to report")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    stem = path.with_suffix("")
    written = {"rows": path}
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS + EXTRA_FIELDS)
        writer.writeheader()
        for r in rows:
            writer.writerow(asdict(r))
    agg = aggregate(rows)
    agg_path = stem.with_name(stem.name + ".agg.csv")
    with open(agg_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(agg[0]))
        writer.writeheader()
        writer.writerows(agg)
    written["aggregate"] = agg_path
    meta_path = stem.with_name(stem.name + ".meta.json")
    meta = {
        "kind": kind,
        "rows": len(rows),
        "regressions": sum(r.regression for r in rows),
        "skipped": sum(r.skipped for r in rows),
    }
    if config is not None:
        meta.update(
            sizes=list(config.sizes),
            clusters=config.clusters,
            total=str(config.total),
            seed=config.seed,
            blocks=config.blocks,
            workers=config.resolved_workers(),
            repeats=config.repeats,
        )
    meta_path.write_text(json.dumps(meta, indent=2) + "\n")
    written["meta"] = meta_path
    if figure:
        from .plotting import plot_completion_time, plot_oracle_calls

        fig_path = stem.with_name(stem.name + ".png")
        if kind == "timing":
            plot_completion_time(agg, fig_path)
        else:
            plot_oracle_calls(agg, fig_path)
        written["figure"] = fig_path
    return written
