import pytest

from bitbound.encoding import bitlen, pair
from bitbound.fixtures import COUNTER, LOOP, PARITY
from bitbound.trace import classify, run
from bitbound.wrappers import (check_wrapper_witness, f1_map, f2_map, fstar_map, g1_map, g2_map,
                               gstar_map, m1_run, m1star_run, m2_run, quintuple, star_bits,
                               triple, wrapper_run, wrapper_trace)


def test_m1_decides_parity():
    fx = PARITY()
    assert m1_run(triple(fx.code, 7, 12)).accepted
    assert not m1_run(triple(fx.code, 5, 12)).accepted


def test_m1_rejects_when_time_runs_out():
    fx = LOOP(4)
    assert not m1_run(triple(fx.code, 0, 3)).accepted
    assert m1_run(triple(fx.code, 0, 4)).accepted


def test_m1_rejects_non_triples():
    for z in (0, 1, 2, 17, 1000):
        r = m1_run(z)
        assert not r.accepted
    assert not m1_run(triple(0, 3, 3)).wellformed


@pytest.mark.parametrize("x", [0, 1, 2, 3])
def test_m2_on_counter_matches_direct_run(x):
    fx = COUNTER()
    t, _, _ = fx.witness.bounds((x,))
    r = m2_run(triple(fx.code, x, t))
    Y = run(fx.code, (x,), t, bitlen(t), t)
    assert r.accepted == (classify(Y) == "accepting")
    assert r.accepted


def test_m1star_rejects_rounds_beyond_t():
    fx = PARITY()
    r = m1star_run(quintuple(fx.code, 5, 3, pair(4, 0), 4))
    assert not r.wellformed and not r.accepted
    assert "u_v" in r.reason


def test_m1star_rejects_positions_beyond_bd0():
    fx = PARITY()
    r = m1star_run(quintuple(fx.code, 5, 3, pair(1, 10**6), 4))
    assert not r.wellformed


@pytest.mark.parametrize("x,t,s", [(0, 1, 1), (1, 2, 1), (5, 3, 2)])
def test_star_bits_reconstruct_the_computation(x, t, s):
    fx = LOOP(2)
    Y = run(fx.code, (x,), t, s, s)
    assert star_bits("m1star", fx.code, x, t, s) == Y.set.below(Y.bd)
    back = gstar_map("m1star", fx.code, x, t, s)
    assert back.set == Y.set.below(Y.bd)


def test_fstar_decides_single_bits():
    fx = PARITY()
    Y = run(fx.code, (6,), 3, 2, 2)
    for v in range(0, Y.bd, 7):
        assert fstar_map("m1star", Y, v).accepted == (v in Y.set)


@pytest.mark.parametrize("x", [5, 6, 7])
def test_m1_trace_round_trip(x):
    fx = PARITY()
    Y = run(fx.code, (x,), 12, 12, 12)
    W = f1_map(Y)
    assert W.verdict == ("accept" if bin(x).count("1") % 2 else "reject")
    assert g1_map(W).set.below(Y.bd) == Y.set.below(Y.bd)
    assert wrapper_trace("m1", W.z).utrace == W.utrace


def test_m2_trace_round_trip():
    fx = COUNTER()
    t = fx.witness.bounds((2,))[0]
    Y = run(fx.code, (2,), t, bitlen(t), t)
    assert g2_map(f2_map(Y)).set.below(Y.bd) == Y.set.below(Y.bd)


def test_f1_needs_a_halting_computation():
    fx = LOOP(4)
    Y = run(fx.code, (0,), 2, 2, 2)
    with pytest.raises(ValueError):
        f1_map(Y)


@pytest.mark.parametrize("kind", ["m1", "m2", "m1star", "m2star"])
def test_published_witnesses_hold(kind):
    assert check_wrapper_witness(kind, range(48)).ok


def test_unknown_wrapper_kind():
    with pytest.raises(ValueError):
        wrapper_run("m3", 5)
