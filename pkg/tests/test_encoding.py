import pytest
from hypothesis import given, strategies as st

from bitbound.encoding import (NatSet, bd, bd0, bitlen, is_log_gt1, pair, rows_needed,
                               slice_set, tuple_code, unpair, untuple)

naturals = st.integers(min_value=0, max_value=1 << 200)
small = st.integers(min_value=0, max_value=1 << 12)


def test_pair_base_case():
    assert pair(0, 0) == 0


def test_pair_known_value():
    assert pair(2, 3) == 18
    assert unpair(18) == (2, 3)


def test_pairing_enumerates_diagonals():
    # brute force over the first few diagonals
    expected = {}
    z = 0
    for d in range(20):
        for y in range(d + 1):
            expected[z] = (d - y, y)
            z += 1
    assert {z: unpair(z) for z in expected} == expected


@given(naturals, naturals)
def test_pair_roundtrip(x, y):
    assert unpair(pair(x, y)) == (x, y)


@given(naturals)
def test_unpair_roundtrip(z):
    assert pair(*unpair(z)) == z


@given(small, small)
def test_pair_monotone_in_each_argument(x, y):
    assert pair(x, y) < pair(x + 1, y)
    assert pair(x, y) < pair(x, y + 1)
    assert pair(x, y) >= max(x, y)


@pytest.mark.parametrize("x,n", [(0, 0), (1, 1), (6, 3), (7, 3), (8, 4), (1 << 100, 101)])
def test_bitlen(x, n):
    assert bitlen(x) == n


def test_is_log_gt1():
    assert [n for n in range(12) if is_log_gt1(n)] == list(range(2, 12))


@given(st.lists(naturals, min_size=1, max_size=6))
def test_tuple_roundtrip(xs):
    assert untuple(tuple_code(*xs), len(xs)) == tuple(xs)


def test_tuples_nest_to_the_right():
    assert tuple_code(1, 2, 3) == pair(1, pair(2, 3))
    assert tuple_code(7) == 7


def test_slice_examples():
    assert slice_set(NatSet([pair(0, 5), pair(1, 7)]), 1) == NatSet([7])
    assert slice_set(NatSet(), 0) == NatSet()
    assert slice_set(NatSet([pair(2, 0), pair(2, 4)]), 2) == NatSet([0, 4])


@given(st.lists(st.tuples(st.integers(0, 10), st.integers(0, 1 << 40)), max_size=30))
def test_slices_reassemble(items):
    Y = NatSet(pair(i, v) for i, v in items)
    assert NatSet.assemble(Y.slices()) == Y
    for i in range(11):
        assert Y.slice(i) == NatSet(v for j, v in items if j == i)


def test_bd0_example():
    # |M| = 9, |x| = 3, s = 4, q = 2: rows max(4, 5, 2) = 5, bound pair(6, 9)
    M, x = 256, 5
    assert bitlen(M) == 9 and bitlen(x) == 3
    assert rows_needed((x,), 4, 2) == 5
    assert bd0(M, (x,), 4, 2) == pair(6, 9) == 129


def test_bd_at_time_zero():
    assert bd(256, (5,), 0, 4, 2) == pair(0, 129)


def test_natset_basics():
    Y = NatSet([5, 1, 3, 3])
    assert list(Y) == [1, 3, 5] and len(Y) == 3
    assert Y.below(4) == NatSet([1, 3])
    assert Y.flip(3) == NatSet([1, 5]) and Y.flip(4) == NatSet([1, 3, 4, 5])
    assert Y == {1, 3, 5}
    assert NatSet.loads(Y.dumps()) == Y
    with pytest.raises(ValueError):
        NatSet([-1])
    with pytest.raises(ValueError):
        NatSet.loads("1\nx\n")
