import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bitbound.circuit import (Builder, Circuit, CircuitError, and2, and2_single, code_length,
                              const, decode, encode, eval as eval_single, eval_many, eval_tuple,
                              flip_point, negate, not1, random_circuit, restrict,
                              size_bound_bits, truth_ranges, truth_table, truth_table_brute,
                              _counter_lanes)
from bitbound.encoding import NatSet
from bitbound.synth import compile_predicate


def _random(seed, layout=(3, 4), gates=25):
    return random_circuit(random.Random(seed), layout, gates)


def test_and2_rows():
    c = and2()
    assert [eval_tuple(c, xy) for xy in [(0, 0), (0, 1), (1, 0), (1, 1)]] == [0, 0, 0, 1]


def test_single_argument_out_of_range_is_zero():
    c = and2_single()
    assert eval_single(c, 3) == 1
    assert eval_single(c, 4) == 0
    assert eval_single(c, -1) == 0


def test_non_codes_evaluate_to_zero():
    assert decode(0) is None
    assert eval_single(0, 5) == 0
    assert eval_tuple(0, (1, 1)) == 0


def test_tuple_component_out_of_range_is_zero():
    assert eval_tuple(and2(), (2, 1)) == 0


def test_small_truth_tables():
    assert truth_table(const(0)) == NatSet()
    assert truth_table(not1()) == NatSet([0])
    assert truth_table(and2_single()) == NatSet([3])


def test_restrict_and2():
    one = restrict(and2(), [1])
    zero = restrict(and2(), [0])
    assert [eval_tuple(one, (y,)) for y in (0, 1)] == [0, 1]
    assert [eval_tuple(zero, (y,)) for y in (0, 1)] == [0, 0]


def test_restrict_rejects_oversized_arguments():
    with pytest.raises(CircuitError):
        restrict(and2(), [2])
    with pytest.raises(CircuitError):
        restrict(and2(), [1, 1, 1])


@given(st.integers(0, 10**6), st.integers(0, 7), st.integers(0, 15))
def test_restrict_law(seed, x, y):
    c = _random(seed)
    r = restrict(c, [x])
    assert eval_tuple(r, (y,)) == eval_tuple(c, (x, y))
    assert encode(r) <= encode(c)


@given(st.integers(0, 10**6), st.lists(st.integers(1, 5), min_size=0, max_size=3),
       st.integers(0, 60))
def test_encode_decode_round_trip(seed, layout, gates):
    c = random_circuit(random.Random(seed), layout, gates)
    raw = encode(c, check_bound=False)
    assert decode(raw) == c
    assert raw.bit_length() == code_length(c)
    if code_length(c) > size_bound_bits(c.size):
        with pytest.raises(CircuitError):
            encode(c)
    else:
        assert encode(c) == raw


def test_decoding_rejects_garbage():
    rng = random.Random(5)
    for _ in range(2000):
        n = rng.getrandbits(rng.randint(1, 200))
        c = decode(n)
        if c is not None:
            assert encode(c) == n


@given(st.integers(0, 10**6), st.integers(0, 12), st.integers(0, 40))
def test_truth_table_matches_brute_force(seed, width, gates):
    c = random_circuit(random.Random(seed), (width,), gates)
    assert truth_table(c) == truth_table_brute(c)


def test_truth_ranges_cover_the_table():
    c = _random(11, (10,), 60)
    members = set()
    for lo, hi in truth_ranges(c):
        members.update(range(lo, hi))
    assert NatSet(members) == truth_table_brute(c)


@pytest.mark.parametrize("free", [3, 6, 9])
def test_counter_lanes_match_pointwise_evaluation(free):
    c = _random(7, (12,), 80)
    prefixes = np.array([0, 3, 5, 7], dtype=np.int64)
    got = _counter_lanes(c, prefixes, free)
    for p_idx, p in enumerate(prefixes):
        for j in range(0, 1 << free, max(1, (1 << free) // 17)):
            assert got[p_idx, j] == eval_single(c, (int(p) << free) | j)


def test_table_compiler_reproduces_and2():
    c = compile_predicate("table", NatSet([3]), 2)
    assert truth_table(c) == truth_table(and2_single())


@given(st.sets(st.integers(0, 63)))
def test_table_compiler_is_exact(members):
    assert truth_table(compile_predicate("table", NatSet(members), 6)) == NatSet(members)


def test_negate_and_flip_point():
    c = _random(3, (3, 4), 30)
    n = negate(c)
    f = flip_point(c, (5, 9))
    for x in range(8):
        for y in range(16):
            assert eval_tuple(n, (x, y)) == 1 - eval_tuple(c, (x, y))
            expect = eval_tuple(c, (x, y)) ^ ((x, y) == (5, 9))
            assert eval_tuple(f, (x, y)) == expect


def test_builder_folds_constants():
    bl = Builder()
    (x,) = bl.inputs(1)
    assert bl.AND(x, bl.const(0)) == bl.const(0)
    assert bl.OR(x, bl.const(0)) == x
    assert bl.AND(x, bl.NOT(x)) == bl.const(0)


def test_eval_many_matches_eval_tuple():
    c = _random(19, (3, 4), 40)
    pts = [(x, y) for x in range(8) for y in range(16)]
    assert list(eval_many(c, pts)) == [eval_tuple(c, p) for p in pts]


def test_circuit_equality_is_structural():
    a, b = _random(1), _random(1)
    assert a == b and hash(a) == hash(b)
    assert isinstance(a, Circuit) and a != _random(2)
