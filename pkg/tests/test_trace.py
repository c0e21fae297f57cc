import pytest
from hypothesis import given, strategies as st

from bitbound import reference
from bitbound.encoding import NatSet, pair
from bitbound.fixtures import COPY, COUNTER, LOOP, ORACLE, PARITY
from bitbound.terms import WitnessTerms
from bitbound.trace import (Fail, check_witness, classify, context, explain_computation,
                            is_partial_computation, mutation_spot_check, mutation_sweep,
                            query_of, run, space_of, time_of)

from strategies import machines


def test_parity_on_5_rejects():
    fx = PARITY()
    Y = run(fx.code, (5,), 12, 4, 1)
    assert not isinstance(Y, Fail)
    assert classify(Y) == "rejecting"
    assert is_partial_computation(Y)


def test_parity_on_7_accepts():
    fx = PARITY()
    t, s, q = fx.witness.bounds((7,))
    assert classify(run(fx.code, (7,), t, s, q)) == "accepting"


@pytest.mark.parametrize("steps", [1, 2, 4, 6])
def test_loop_halts_at_exactly_t(steps):
    fx = LOOP(steps)
    Y = run(fx.code, (0,), steps + 3, 2, 2)
    assert time_of(Y) == steps
    assert classify(Y) == "accepting"
    assert query_of(Y) == 0


def test_loop_below_its_count_is_non_halting():
    fx = LOOP(4)
    assert classify(run(fx.code, (0,), 3, 2, 2)) == "non-halting"


def test_too_little_space_fails():
    fx = COPY()
    Y = run(fx.code, (13,), 10, 2, 1)
    assert isinstance(Y, Fail)
    assert Y.resource == "space"


def test_space_of_a_machine_without_work_tapes():
    fx = PARITY()
    assert space_of(run(fx.code, (6,), 8, 8, 1)) == 0


def test_oracle_answers_follow_the_set():
    fx = ORACLE()
    for x in range(16):
        t, s, q = fx.witness.bounds((x,))
        verdict = classify(run(fx.code, (x,), t, s, q, fx.oracles))
        assert verdict == ("accepting" if x in fx.oracles[0] else "rejecting")


def test_counter_runs_exponentially_long():
    fx = COUNTER()
    times = [time_of(run(fx.code, (x,), *fx.witness.bounds((x,)))) for x in (1, 3, 7, 15)]
    assert all(b > 1.8 * a for a, b in zip(times, times[1:]))


@pytest.mark.parametrize("name", ["PARITY", "COPY", "LOOP_2", "ORACLE", "COUNTER"])
def test_simulator_agrees_with_reference(name):
    from bitbound.fixtures import by_name
    fx = by_name(name)
    for x in range(12):
        t, s, q = fx.witness.bounds((x,))
        Y = run(fx.code, (x,), t, s, q, fx.oracles)
        ref = reference.trace_set(fx.code, x, t, s, q, fx.oracles)
        assert (ref is None) == isinstance(Y, Fail)
        if ref is not None:
            assert set(Y.set) == ref


@given(machines(max_l=0), st.integers(0, 15), st.integers(0, 6), st.integers(1, 4))
def test_random_machines_agree_with_reference(spec, x, t, s):
    from bitbound.machine import encode_machine
    M = encode_machine(spec)
    Y = run(M, (x,), t, s, 1)
    ref = reference.trace_set(M, x, t, s, 1)
    assert (ref is None) == isinstance(Y, Fail)
    if ref is not None:
        assert set(Y.set) == ref
        assert is_partial_computation(Y)


def test_mutation_sweep_rejects_every_flip():
    fx = PARITY()
    Y = run(fx.code, (5,), 6, 4, 1)
    rep = mutation_sweep(Y)
    assert rep.ok and rep.total == Y.bd
    assert sum(rep.by_conjunct.values()) == rep.total


def test_sweep_agrees_with_full_reevaluation():
    fx = COPY()
    Y = run(fx.code, (6,), 6, 6, 1)
    verdicts = mutation_spot_check(Y, samples=60, seed=3)
    assert all(v != "accepted" for _, v in verdicts)


def test_elements_beyond_bd_do_not_matter():
    fx = PARITY()
    Y = run(fx.code, (5,), 12, 4, 1)
    bigger = Y.set.union([Y.bd, Y.bd + 17])
    assert explain_computation(bigger, Y.t, Y.ctx).ok


def test_extra_slice_is_caught_only_by_the_extent_conjunct():
    fx = PARITY()
    Y = run(fx.code, (5,), 4, 4, 1)
    padded = Y.set.union([pair(Y.t + 1, 0)])
    assert pair(Y.t + 1, 0) < Y.bd
    assert not explain_computation(padded, Y.t, Y.ctx).ok
    assert explain_computation(padded, Y.t, Y.ctx, strict=False).ok


def test_empty_set_is_not_a_computation():
    fx = PARITY()
    v = explain_computation(NatSet(), 3, context(fx.code, (5,), 4, 1))
    assert not v.ok and v.conjunct == "start"


def test_check_witness_passes_a_dominating_term():
    fx = PARITY()
    rep = check_witness(fx.code, WitnessTerms.exp("4*(len(x)+2)**2"), [(x,) for x in range(64)])
    assert rep.ok and rep.checked == 64


def test_check_witness_reports_a_violation():
    fx = PARITY()
    rep = check_witness(fx.code, WitnessTerms.exp("len(x)"), [(x,) for x in range(64)])
    assert not rep.ok
    assert rep.violation["inputs"] == [0] or rep.violation["inputs"] == [1]


def test_query_bound_uses_the_length_of_q0():
    # the oracle machine writes |x| bits; q0 = 2**|x| has length |x|+1, q0 = |x|+1 is too short
    fx = ORACLE()
    ok = WitnessTerms.general("len(x)+4", "1", "2**(len(x)+1)")
    short = WitnessTerms.general("len(x)+4", "1", "len(x)+1")
    xs = [(x,) for x in range(1, 64)]
    assert check_witness(fx.code, ok, xs, fx.oracles).ok
    assert not check_witness(fx.code, short, xs, fx.oracles).ok


@given(st.lists(st.integers(0, 5000), max_size=6), st.sampled_from([(5, 12), (6, 3), (2, 7)]))
def test_verdict_and_class_ignore_elements_beyond_bd(offsets, case):
    x, t = case
    fx = PARITY()
    Y = run(fx.code, (x,), t, 4, 1)
    extra = Y.set.union([Y.bd + d for d in offsets])
    assert is_partial_computation(extra, Y.t, Y.ctx) == is_partial_computation(Y)
    assert classify(type(Y)(extra, Y.t, Y.ctx)) == classify(Y)
