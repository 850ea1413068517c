from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from swshapley.core import (
    BitSourceModel,
    CapExceededError,
    EntropyOracle,
    ModelError,
    RateVector,
    TableModel,
    conditional_entropy,
    dual_entropy,
    entropy,
    full_mask,
    load_fixture,
    mask_of,
    members,
    model_from_dict,
    model_to_dict,
    mutual_information,
    ordered_subsets,
    parse_rates,
    restrict_model,
    verify_polymatroid,
)
from tests.conftest import models
from tests.oracles import coverage_entropy

S = mask_of  # 0-based players


def test_entropy_values(ex1):
    assert entropy(ex1, S([0, 1, 2])) == F(24, 5)
    assert entropy(ex1, 0) == 0
    assert entropy(ex1, S([1, 2])) == F(19, 5)
    assert entropy(ex1, [0]) == F(43, 10)


def test_entropy_out_of_range(ex1):
    with pytest.raises(ModelError):
        entropy(ex1, S([3]))


def test_conditional_entropy(ex1):
    assert conditional_entropy(ex1, S([0]), S([1, 2])) == 1
    assert conditional_entropy(ex1, S([0, 1]), S([2])) == F(23, 10)
    assert conditional_entropy(ex1, S([1]), S([1, 2])) == 0


def test_mutual_information(ex1, indep):
    # 9/5 + 5/2 - 19/5
    assert mutual_information(ex1, S([1]), S([2])) == F(1, 2)
    assert mutual_information(indep, S([0]), S([1])) == 0
    assert mutual_information(ex1, 0, S([1, 2])) == 0


def test_dual_entropy(ex1, two):
    assert dual_entropy(two, S([0])) == 1
    assert dual_entropy(two, S([0, 1])) == 7
    assert dual_entropy(ex1, S([1, 2])) == F(1, 2)


def test_sw_bounds_of_first_example(ex1):
    want = {
        (0,): F(1),
        (1,): F(0),
        (2,): F(0),
        (0, 1): F(23, 10),
        (0, 2): F(3),
        (1, 2): F(1, 2),
        (0, 1, 2): F(24, 5),
    }
    for players, value in want.items():
        assert dual_entropy(ex1, S(players)) == value


def test_two_terminal_fixture(two):
    assert [entropy(two, m) for m in range(4)] == [0, 4, 6, 7]


def test_polymatroid_checks(ex1):
    assert verify_polymatroid(ex1)
    neg = BitSourceModel(2, (("a", F(1)), ("b", F(-1))), ({"a"}, {"a", "b"}), allow_negative=True)
    report = verify_polymatroid(neg)
    assert not report.ok and report.failure == "monotonicity"
    assert report.witness == (S([0]), S([0, 1]))
    single = BitSourceModel(1, (("a", F(2, 3)),), ({"a"},))
    assert verify_polymatroid(single)


def test_non_submodular_table_is_caught():
    # H({1,2}) > H({1}) + H({2})
    bad = TableModel(2, (0, 1, 1, 3))
    report = verify_polymatroid(bad)
    assert report.failure == "submodularity"


def test_negative_weight_rejected_by_default():
    with pytest.raises(ModelError):
        BitSourceModel(1, (("a", F(-1)),), ({"a"},))


def test_unknown_bit_rejected():
    with pytest.raises(ModelError):
        BitSourceModel(1, (("a", F(1)),), ({"z"},))


def test_cap():
    wide = BitSourceModel(25, (), tuple(frozenset() for _ in range(25)))
    with pytest.raises(CapExceededError):
        verify_polymatroid(wide)


def test_ledger_memoized_counts_distinct(ex1):
    oracle = EntropyOracle(ex1)
    with oracle.phase("p"):
        for m in [1, 2, 1, 3, 2, 1]:
            oracle(m)
    assert oracle.ledger["p"] == 3


def test_ledger_unmemoized_counts_calls(ex1):
    oracle = EntropyOracle(ex1)
    with oracle.phase("p", memoize=False):
        for m in [1, 2, 1, 3, 2, 1]:
            oracle(m)
    assert oracle.ledger["p"] == 6
    assert oracle.memoize is True


def test_ledger_phases_separate(ex1):
    oracle = EntropyOracle(ex1)
    with oracle.phase("a"):
        oracle(1)
    with oracle.phase("b"):
        oracle(1)
    assert oracle.ledger.counts == {"a": 1, "b": 1}
    assert oracle.ledger.total == 2
    assert oracle.distinct == {1}


def test_subgame_oracle_charges_parent(ex1):
    oracle = EntropyOracle(ex1)
    sub = oracle.restricted(S([1, 2]))
    assert sub(S([0])) == F(9, 5)
    assert sub(S([0, 1])) == F(19, 5)
    assert oracle.distinct == {S([1]), S([1, 2])}


def test_restrict_model(ex5, ex1):
    sub = restrict_model(ex5, S([0, 2]))
    assert sub.origin == (0, 2)
    assert [sub.entropy(m) for m in range(4)] == [0, 2, F(8, 5), F(13, 5)]
    same = restrict_model(ex1, full_mask(3))
    assert all(same.entropy(m) == ex1.entropy(m) for m in range(8))
    assert restrict_model(ex1, S([1])).entropy(1) == F(9, 5)
    with pytest.raises(ModelError):
        restrict_model(ex1, 0)


def test_restrict_table_model():
    table = TableModel(2, (0, 4, 6, 7))
    sub = restrict_model(table, S([1]))
    assert sub.values == (0, 6) and sub.origin == (1,)


def test_rate_vector():
    r = parse_rates("1, 9/5 ,2")
    assert r == RateVector([1, F(9, 5), 2])
    assert r.sum_over(S([0, 2])) == 3
    assert r.sum_over(0) == 0
    assert r.total() == F(24, 5)
    with pytest.raises(ModelError):
        parse_rates("1,x")


def test_ordered_subsets_order():
    assert [members(m) for m in ordered_subsets(3)] == [
        [0], [1], [2], [0, 1], [0, 2], [1, 2], [0, 1, 2]
    ]


def test_instance_round_trip(ex1):
    again = model_from_dict(model_to_dict(ex1))
    assert all(again.entropy(m) == ex1.entropy(m) for m in range(8))


def test_instance_rejects_bad_denominator():
    with pytest.raises(ModelError):
        model_from_dict({"players": 1, "bits": [{"id": "a", "weight": [1, 0]}], "observes": {"1": ["a"]}})


def test_fixture_names():
    for name in ["example1", "independent", "decomposable", "two_terminal"]:
        assert load_fixture(name).n in (2, 3)


@settings(max_examples=60, deadline=None)
@given(models(max_players=6))
def test_entropy_matches_set_union(model):
    for m in range(1 << model.n):
        assert model.entropy(m) == coverage_entropy(model, members(m))


@settings(max_examples=60, deadline=None)
@given(models(max_players=6))
def test_coverage_model_is_polymatroid(model):
    assert verify_polymatroid(model)
    h = [model.entropy(m) for m in range(1 << model.n)]
    v = full_mask(model.n)
    for x in range(1 << model.n):
        assert dual_entropy(model, x) + h[v & ~x] == h[v]
        for y in range(1 << model.n):
            assert h[x] + h[y] >= h[x & y] + h[x | y]
            if x & ~y == 0:
                assert h[x] <= h[y]
