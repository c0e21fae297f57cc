import pytest
from hypothesis import given, strategies as st

from bitbound.encoding import bd0, bitlen
from bitbound.fixtures import COPY, LOOP, PARITY, by_name
from bitbound.trace import Fail, run
from bitbound.universal import (RESOURCE_EXPONENT, SweepAudit, UTraceError, f_map, g_map,
                                input_size, phase_lengths, reject_time, resource_bound,
                                schedule, timing_errors, u_run, validate)


def test_phase_lengths_worked_example():
    assert phase_lengths(5, 4, 2) == (48, 198, 207, 1049, 7)


@given(st.integers(1, 5000), st.integers(1, 40), st.integers(1, 40))
def test_phase_lengths_nest(s0, len_t0, len_t):
    t1, t2, t3, t4, q0 = phase_lengths(s0, len_t0, len_t)
    counter = 2 * bitlen(s0) + 2
    assert t1 == 1 + counter * s0 + s0 + 2
    assert t2 == 1 + len_t0 * t1 + len_t0 + 1
    assert t3 == counter + t2 + 1
    assert t4 > s0 * t3
    assert q0 == 2 * len_t + 3


def test_schedule_accessors():
    fx = PARITY()
    sch = schedule(fx.code, (5,), 12, 4, 1)
    assert sch.s0 == bd0(fx.code, (5,), 4, 1)
    assert sch.r_u(1) - sch.r_u(0) == sch.t4
    assert sch.r_ui(2, 3) == sch.r_u(2) + 1 + 3 * sch.t3
    assert sch.r_uijp(1, 2, 3, 4) == sch.r_uij(1, 2, 3) + 1 + (2 * sch.ls + 2) * 4
    assert sch.t5 == sch.r0 + (sch.t + 1) * sch.t4 + sch.q0
    grid = sch.sweep_grid(1, 2)
    assert grid[3, 4] == sch.r_uijp(1, 2, 3, 4)


@pytest.mark.parametrize("x,t,s,q", [(5, 12, 4, 1), (7, 12, 4, 1), (6, 2, 4, 1), (0, 0, 1, 0)])
def test_u_verdict_matches_direct_run(x, t, s, q):
    fx = PARITY()
    Z = u_run(fx.code, (x,), t, s, q)
    Y = run(fx.code, (x,), t, s, q)
    assert Z.accepted == (not isinstance(Y, Fail))
    assert timing_errors(Z) == []
    if Z.accepted:
        assert g_map(Z).set.below(Y.bd) == Y.set.below(Y.bd)


def test_space_failure_sets_the_flag():
    fx = COPY()
    Z = u_run(fx.code, (13,), 10, 2, 1)
    assert Z.verdict == "reject"
    assert Z.fail_round is not None
    assert all(b >= a for a, b in zip(Z.flags, Z.flags[1:]))
    with pytest.raises(UTraceError):
        g_map(Z)


def test_non_code_rejects_in_preparation():
    Z = u_run(0, (5,), 3, 4, 1)
    assert not Z.suitable and Z.verdict == "reject"
    assert Z.end_time == reject_time(0)
    assert timing_errors(Z) == []


def test_wrong_input_count_rejects_in_preparation():
    fx = PARITY()
    assert u_run(fx.code, (5, 6), 3, 4, 1).verdict == "reject"


def test_round_trips():
    fx = LOOP(3)
    for x in range(6):
        Y = run(fx.code, (x,), 5, 2, 2)
        Z = u_run(fx.code, (x,), 5, 2, 2)
        assert g_map(f_map(Y)).set.below(Y.bd) == Y.set.below(Y.bd)
        assert f_map(g_map(Z)) == Z
        assert validate(f_map(Y)) == []


def test_rounds_have_uniform_length():
    fx = PARITY()
    Z = u_run(fx.code, (9,), 6, 4, 1)
    gaps = {b - a for a, b in zip(Z.round_starts[:-1], Z.round_starts[1:])}
    assert gaps == {schedule(fx.code, (9,), 6, 4, 1).t4}


@pytest.mark.parametrize("x,t", [(1, 1), (2, 2)])
def test_sweep_reads_follow_the_schedule(x, t):
    fx = LOOP(2)
    sch = schedule(fx.code, (x,), t, 1, 1)
    audit = SweepAudit(sch)
    Z = u_run(fx.code, (x,), t, 1, 1, detail="sweeps", sink=audit)
    assert audit.ok and audit.cells == (t + 1) * sch.s0
    assert Z == u_run(fx.code, (x,), t, 1, 1)
    assert timing_errors(Z) == []


def test_resource_bounds_hold_for_fixtures():
    for name in ("PARITY", "COPY", "LOOP_2", "ORACLE"):
        fx = by_name(name)
        for x in range(8):
            t, s, q = fx.witness.bounds((x,))
            sch = schedule(fx.code, (x,), t, s, q)
            n = input_size(fx.code, (x,), t, s, q)
            assert sch.t5 <= resource_bound(t, s, n)
            assert sch.space() <= (s + n) ** RESOURCE_EXPONENT


def test_unsupported_detail_level():
    fx = PARITY()
    with pytest.raises(ValueError):
        u_run(fx.code, (1,), 1, 1, 1, detail="steps")
