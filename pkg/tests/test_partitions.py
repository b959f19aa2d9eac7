import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qperm.errors import DomainError
from qperm.partitions import (
    ColoredWord,
    Partition,
    bell,
    catalan,
    delta,
    enumerate_colored_nc,
    enumerate_partitions,
    is_noncrossing,
    join,
    kernel_of_index,
)

P = Partition.from_blocks


def crossing_by_quadruples(p: Partition) -> bool:
    lab = p.labels()
    for a, b, c, d in itertools.combinations(range(p.k), 4):
        if lab[a] == lab[c] and lab[b] == lab[d] and lab[a] != lab[b]:
            return True
    return False


def join_by_enumeration(p: Partition, q: Partition) -> Partition:
    # the unique minimal partition above both, found by scanning all partitions
    above = [r for r in enumerate_partitions(p.k, False) if p.refines(r) and q.refines(r)]
    minimal = [r for r in above if all(not s.refines(r) or s == r for s in above)]
    assert len(minimal) == 1
    return minimal[0]


def test_nc2_listing():
    assert enumerate_partitions(2, True) == [P([[1, 2]]), P([[1], [2]])]


def test_counts_small():
    assert len(enumerate_partitions(4, True)) == 14
    assert len(enumerate_partitions(4, False)) == 15


def test_k0_is_single_empty_partition():
    parts = enumerate_partitions(0)
    assert len(parts) == 1 and parts[0].blocks == () and parts[0].rgs() == ""


def test_negative_k():
    with pytest.raises(DomainError):
        enumerate_partitions(-1)


@pytest.mark.parametrize("k", range(11))
def test_catalan_counts(k):
    assert len(enumerate_partitions(k, True)) == catalan(k)


@pytest.mark.parametrize("k", range(9))
def test_bell_counts(k):
    assert len(enumerate_partitions(k, False)) == bell(k)


def test_catalan_bell_values():
    assert [catalan(k) for k in range(7)] == [1, 1, 2, 5, 14, 42, 132]
    assert [bell(k) for k in range(7)] == [1, 1, 2, 5, 15, 52, 203]


def test_enumeration_order_is_lexicographic_rgs():
    rgs = [p.rgs() for p in enumerate_partitions(5, False)]
    assert rgs == sorted(rgs)
    assert len(set(rgs)) == len(rgs)


def test_noncrossing_examples():
    assert not is_noncrossing(P([[1, 3], [2, 4]]))
    assert is_noncrossing(P([[1, 2], [3, 4]]))
    assert is_noncrossing(Partition.singletons(5))
    assert is_noncrossing(P([[1, 4], [2, 3]]))
    assert not is_noncrossing(P([[1, 3, 5], [2, 4]]))


@pytest.mark.parametrize("k", range(8))
def test_noncrossing_matches_quadruple_scan(k):
    for p in enumerate_partitions(k, False):
        assert is_noncrossing(p) == (not crossing_by_quadruples(p))


def test_canonical_form_and_rgs_roundtrip():
    p = Partition(4, ((4, 3), (2, 1)))
    assert p.blocks == ((1, 2), (3, 4))
    assert p.rgs() == "0011"
    assert Partition.from_rgs("0011") == p
    assert hash(p) == hash(Partition.from_rgs("0011"))


def test_invalid_blocks_rejected():
    with pytest.raises(DomainError):
        Partition(3, ((1, 2),))
    with pytest.raises(DomainError):
        Partition(2, ((1, 2), (2,)))


def test_join_examples():
    p = P([[1, 2], [3]])
    assert join(p, p) == p
    assert join(p, Partition.singletons(3)) == p
    assert join(P([[1, 2], [3]]), P([[1], [2, 3]])) == P([[1, 2, 3]])
    assert join(P([[1, 2], [3]]), P([[1], [2, 3]])) == join_by_enumeration(P([[1, 2], [3]]), P([[1], [2, 3]]))


def test_join_mismatch():
    with pytest.raises(DomainError):
        join(Partition.singletons(2), Partition.singletons(3))


@pytest.mark.parametrize("k", range(1, 6))
def test_join_is_least_upper_bound_exhaustive(k):
    parts = enumerate_partitions(k, False)
    for p in parts:
        for q in parts:
            j = join(p, q)
            assert j == join(q, p)
            assert p.refines(j) and q.refines(j)
            for r in parts:
                if p.refines(r) and q.refines(r):
                    assert j.refines(r)


def test_join_matches_enumeration_oracle():
    parts = enumerate_partitions(4, False)
    for p in parts:
        for q in parts:
            assert join(p, q) == join_by_enumeration(p, q)


def test_join_associative_k4():
    parts = enumerate_partitions(4, False)
    for p, q, r in itertools.product(parts, repeat=3):
        assert join(join(p, q), r) == join(p, join(q, r))


def test_kernel_of_index():
    assert kernel_of_index((3, 3, 1)) == P([[1, 2], [3]])
    assert kernel_of_index((2, 2, 2, 2)) == Partition.one_block(4)
    assert kernel_of_index((1, 2, 3)) == Partition.singletons(3)


def test_delta_examples():
    assert delta(P([[1, 2]]), (4, 4)) == 1
    assert delta(P([[1, 2]]), (4, 5)) == 0
    assert delta(Partition.singletons(3), (1, 7, 2)) == 1
    assert delta(Partition.singletons(0), ()) == 1


def test_delta_length_mismatch():
    with pytest.raises(DomainError):
        delta(P([[1, 2]]), (1,))


@given(st.lists(st.integers(0, 3), min_size=0, max_size=6))
def test_delta_is_refinement_of_kernel(i):
    k = len(i)
    ker = kernel_of_index(i)
    for p in enumerate_partitions(k, False):
        assert delta(p, i) == int(p.refines(ker))
        # blockwise: i is constant on each block separately
        assert delta(p, i) == int(all(len({i[x - 1] for x in b}) == 1 for b in p.blocks))


@settings(max_examples=60)
@given(st.lists(st.integers(0, 2), min_size=1, max_size=5))
def test_delta_monotone(i):
    parts = enumerate_partitions(len(i), False)
    for p in parts:
        for q in parts:
            if p.refines(q):
                assert delta(q, i) <= delta(p, i)


def test_colored_nc_examples():
    assert enumerate_colored_nc(ColoredWord(2, (1, 1))) == [P([[1, 2]])]
    assert len(enumerate_colored_nc(ColoredWord(1, (0, 0, 0, 0)))) == 14
    assert enumerate_colored_nc(ColoredWord(2, (1, 0))) == []


@pytest.mark.parametrize("k", range(6))
def test_colored_s1_is_nc(k):
    assert enumerate_colored_nc(ColoredWord(1, (0,) * k)) == enumerate_partitions(k, True)


def test_colored_word_validation():
    with pytest.raises(DomainError):
        ColoredWord(2, (2,))
    assert ColoredWord.parse(4, "1,-1").letters == (1, 3)
    assert ColoredWord.parse(3, "").letters == ()
