import csv
import json
import statistics

import pytest

from swshapley import bench
from swshapley.bench import BenchConfig, BenchRow, aggregate, emit_report


@pytest.fixture(scope="module")
def small_rows():
    return bench.run_oracle_count_experiment(BenchConfig(sizes=[5, 6, 7], clusters=4, seed=1, workers=1))


def test_direct_calls_are_powers_of_two(small_rows):
    for r in small_rows:
        assert r.directCalls == 2 ** r.players
        assert not r.regression


def test_decomposed_calls_bounded(small_rows):
    for r in small_rows:
        bound = r.players / r.maxBlockSize * 2 ** r.maxBlockSize + 4 * r.players**2
        assert r.decomposedCalls <= r.decomposedCallsRaw <= bound


def test_workers_do_not_change_counts(small_rows):
    again = bench.run_oracle_count_experiment(BenchConfig(sizes=[5, 6, 7], clusters=4, seed=1, workers=2))
    key = lambda r: (r.players, r.clusterId, r.directCalls, r.decomposedCalls, r.maxBlockSize)
    assert [key(r) for r in again] == [key(r) for r in small_rows]


def test_cap_marks_row_skipped():
    rows = bench.run_oracle_count_experiment(BenchConfig(sizes=[4], clusters=1, cap=3, workers=1))
    assert rows[0].skipped


def test_report_files(tmp_path):
    rows = [
        BenchRow(n, c, directCalls=2**n, decomposedCalls=n, maxBlockSize=2)
        for n in range(5, 16)
        for c in range(20)
    ]
    written = emit_report(rows, tmp_path / "out.csv", config=BenchConfig())
    with open(written["rows"]) as fh:
        data = list(csv.DictReader(fh))
    assert len(data) == 220
    assert list(data[0])[:7] == bench.CSV_FIELDS
    assert {d["directCalls"] for d in data if d["players"] == "10"} == {"1024"}
    with open(written["aggregate"]) as fh:
        assert len(list(csv.DictReader(fh))) == 11
    meta = json.loads(written["meta"].read_text())
    assert meta["rows"] == 220 and meta["workers"] >= 1
    assert written["figure"].stat().st_size > 0


def test_timing_figure(tmp_path):
    rows = [BenchRow(n, 0, directTimeSec=n * 1e-3, decomposedTimeSec=1e-4) for n in (5, 6)]
    written = emit_report(rows, tmp_path / "t.csv", kind="timing")
    assert written["figure"].exists()


def test_empty_report_rejected(tmp_path):
    with pytest.raises(ValueError):
        emit_report([], tmp_path / "x.csv")


def test_trivial_instance_times_comparable():
    # a single block: both paths run the same kernel on the same table
    rows = bench.run_parallel_timing_experiment(BenchConfig(sizes=[5], clusters=1, blocks=1, workers=2))
    r = rows[0]
    assert r.blocks == 1 and not r.regression
    assert r.decomposedTimeSec < 50 * r.directTimeSec + 5e-3


def test_aggregate_means():
    rows = [BenchRow(5, 0, directCalls=32, decomposedCalls=10), BenchRow(5, 1, directCalls=32, decomposedCalls=20)]
    (a,) = aggregate(rows)
    assert a["meanDirectCalls"] == 32 and a["meanDecomposedCalls"] == 15


def test_direct_time_grows_with_players():
    rows = bench.run_parallel_timing_experiment(BenchConfig(sizes=[7, 10, 13], clusters=3, repeats=3, workers=1))
    medians = [
        statistics.median(r.directTimeSec for r in rows if r.players == n) for n in (7, 10, 13)
    ]
    assert medians == sorted(medians)
