import json

import pytest
from hypothesis import given, settings, strategies as st

from randpart.partitions import (Partition, bounded_count, bounded_table, enumerate_partitions,
                                 partition_count, partition_counts, unrank_partition)

from oracle import all_partitions, mults


def test_small_counts():
    assert partition_count(0) == 1
    assert partition_count(4) == 5
    assert partition_count(100) == 190569292


def test_counts_match_enumeration():
    assert partition_count(0) == len(all_partitions(0)) == 1
    for n in range(1, 36):
        assert partition_count(n) == len(all_partitions(n))
        assert partition_count(n) == sum(1 for _ in enumerate_partitions(n))


def test_counts_match_bounded_dp():
    for n in range(201):
        assert partition_count(n) == bounded_count(n, n)


def test_table_is_prefix():
    table = partition_counts(50)
    assert table[:11] == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]
    assert len(table) >= 51


@pytest.mark.parametrize("k, expected", [(1, 1), (2, 3), (5, 7)])
def test_bounded_examples(k, expected):
    assert bounded_count(5, k) == expected


@given(st.integers(0, 60), st.integers(0, 70))
def test_bounded_monotone_and_stable(n, k):
    assert bounded_count(n, k) <= bounded_count(n, k + 1)
    if k >= n:
        assert bounded_count(n, k) == partition_count(n)


def test_bounded_against_oracle():
    for n in range(16):
        for k in range(n + 1):
            assert bounded_count(n, k) == sum(1 for p in all_partitions(n) if not p or p[0] <= k)


def test_enumeration_order():
    assert [p.mults for p in enumerate_partitions(1)] == [{1: 1}]
    assert [p.mults for p in enumerate_partitions(3)] == [{3: 1}, {2: 1, 1: 1}, {1: 3}]
    assert sum(1 for _ in enumerate_partitions(4)) == 5


def test_enumeration_limit():
    with pytest.raises(ValueError):
        list(enumerate_partitions(1000))


@pytest.mark.parametrize("n", [1, 7, 12])
def test_unranking_is_a_bijection(n):
    table = bounded_table(n)
    seen = {unrank_partition(n, r, table) for r in range(partition_count(n))}
    assert len(seen) == partition_count(n)
    assert {tuple(p.parts) for p in seen} == set(all_partitions(n))


def test_unrank_rejects_bad_rank():
    with pytest.raises(ValueError):
        unrank_partition(5, 7)
    with pytest.raises(ValueError):
        unrank_partition(5, -1)


@pytest.mark.parametrize("mults_, n", [({2: 1}, 3), ({0: 1}, 0), ({3: 0}, 3), ({5: 1}, 4)])
def test_partition_invariants(mults_, n):
    with pytest.raises(ValueError):
        Partition(n, mults_)


@given(st.lists(st.integers(1, 30), min_size=1, max_size=25))
def test_from_parts_roundtrip(parts):
    p = Partition.from_parts(parts)
    assert p.n == sum(parts)
    assert sorted(p.parts, reverse=True) == sorted(parts, reverse=True)
    assert p.num_parts == len(parts)
    assert p.num_distinct == len(set(parts))
    assert p.mults == mults(parts)
    assert Partition.from_json(json.loads(json.dumps(p.to_json()))) == p


def test_json_shape():
    assert Partition(4, {2: 1, 1: 2}).to_json() == {"n": 4, "mults": {"2": 1, "1": 2}}


@settings(max_examples=30)
@given(st.integers(1, 400))
def test_pentagonal_matches_dp_random(n):
    assert partition_count(n) == bounded_count(n, n)
