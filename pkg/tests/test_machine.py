import random

import pytest
from hypothesis import given, strategies as st

from bitbound.encoding import bd0, pair, rows_needed
from bitbound.fixtures import COPY, LOOP, ORACLE, PARITY, all_fixtures
from bitbound.machine import (ACCEPT, BLANK, MARK, ONE, REJECT, START, ZERO, Config,
                              MachineError, MachineSpec, decode_config, decode_machine,
                              encode_machine, fail_pred, is_suitable, next_pred, start_config,
                              start_pred, succ_step)

from strategies import machines, natsets


@pytest.mark.parametrize("fx", all_fixtures(), ids=lambda f: f.name)
def test_fixture_codes_roundtrip(fx):
    assert decode_machine(encode_machine(fx.spec)) == fx.spec


@given(machines())
def test_random_machines_roundtrip(spec):
    code = encode_machine(spec)
    assert decode_machine(code) == spec


def test_zero_is_not_a_machine():
    assert decode_machine(0) is None


def test_decoding_is_canonical():
    # every natural has at most one meaning: decodable numbers re-encode to themselves
    rng = random.Random(1)
    found = 0
    for _ in range(3000):
        n = rng.getrandbits(rng.randrange(1, 70))
        spec = decode_machine(n)
        if spec is not None:
            found += 1
            assert encode_machine(spec) == n
    for n in range(1 << 12):
        spec = decode_machine(n)
        if spec is not None:
            assert encode_machine(spec) == n


def test_code_exceeds_rows_and_states():
    for fx in all_fixtures():
        code = fx.code
        assert code.bit_length() > 3 * fx.spec.tapes
        assert code.bit_length() > (fx.spec.n_states - 1).bit_length()


def test_is_suitable():
    code = PARITY().code
    assert is_suitable(code, 1, 0)
    assert not is_suitable(code, 1, 1)
    assert is_suitable(ORACLE().code, 1, 1)


def test_build_rejects_illegal_moves():
    with pytest.raises(MachineError):
        # moving left off the end marker
        MachineSpec.build(1, 0, 0, 3, {(START, (MARK,)): (START, (MARK,), (0,))})
    with pytest.raises(MachineError):
        # writing on the input tape
        MachineSpec.build(1, 0, 0, 3, {(START, (ZERO,)): (START, (ONE,), (2,))})
    with pytest.raises(MachineError):
        MachineSpec.build(1, 0, 0, 2)
    with pytest.raises(MachineError):
        MachineSpec.build(1, 1, 0, 4, {}, query_targets=(1,))


def test_missing_entries_reject_in_place():
    spec = PARITY().spec
    assert spec.action(START, (BLANK,)) == (REJECT, (BLANK,), (1,))
    assert spec.action(ACCEPT, (ONE,)) == (REJECT, (ONE,), (1,))


def test_start_config_parity_on_5():
    M = PARITY().code
    X = start_config(M, (5,), 4, 1)
    cfg = decode_config(X, M, (5,), 4, 1)
    m = rows_needed((5,), 4, 1)
    assert cfg.state == START and cfg.heads == (0,)
    assert cfg.cells[0][:5] == (MARK, ONE, ZERO, ONE, BLANK)
    assert all(v < bd0(M, (5,), 4, 1) for v in X)
    assert cfg == Config(START, (0,), ((MARK, ONE, ZERO, ONE) + (BLANK,) * (m - 4),))


def test_start_decoding_ignores_padding():
    M = PARITY().code
    a = decode_config(start_config(M, (5,), 4, 1), M, (5,), 4, 1)
    b = decode_config(start_config(M, (5,), 8, 1), M, (5,), 8, 1)
    assert a.state == b.state and a.heads == b.heads
    assert a.cells[0][:a.m] == b.cells[0][:a.m]
    assert set(b.cells[0][a.m:]) <= {BLANK}


def test_start_pred_matches_set():
    M = PARITY().code
    X = start_config(M, (5,), 4, 1)
    assert [v for v in range(bd0(M, (5,), 4, 1)) if start_pred(M, (5,), 4, 1, v)] == list(X)


def test_one_parity_step():
    M = PARITY().code
    X = start_config(M, (5,), 4, 1)
    out = succ_step(M, (5,), 4, 1, (), X)
    assert out.kind == "Bits"
    cfg = decode_config(out.as_set(), M, (5,), 4, 1)
    assert cfg.state == START and cfg.heads == (1,)


def test_work_head_at_space_bound_fails():
    # COPY moves its work head right every step; with s = 2 it fails on a long input
    fx = COPY()
    M, x, s = fx.code, 7, 2
    X = start_config(M, (x,), s, 0)
    for _ in range(5):
        out = succ_step(M, (x,), s, 0, (), X)
        if out.kind == "Fail":
            assert "space" in out.fail or "work" in out.fail
            return
        X = out.as_set()
    pytest.fail("expected a space failure")


def test_halting_configurations_repeat():
    fx = LOOP(2)
    M = fx.code
    X = start_config(M, (0,), 3, 3)
    for _ in range(2):
        X = succ_step(M, (0,), 3, 3, (), X).as_set()
    assert decode_config(X, M, (0,), 3, 3).state == ACCEPT
    assert succ_step(M, (0,), 3, 3, (), X).as_set() == X


@given(natsets(max_value=5000), st.sampled_from(["PARITY", "COPY", "ORACLE"]),
       st.integers(0, 15))
def test_fail_pred_matches_succ_step(X, name, x):
    fx = {"PARITY": PARITY, "COPY": COPY, "ORACLE": ORACLE}[name]()
    out = succ_step(fx.code, (x,), 3, 5, fx.oracles, X)
    assert fail_pred(fx.code, (x,), 3, 5, fx.oracles, X) == (out.kind == "Fail")
    for v in range(0, 400, 7):
        assert next_pred(fx.code, (x,), 3, 5, fx.oracles, X, v) == out.bit(v)


@given(natsets(max_value=3000), st.integers(0, 7))
def test_next_ignores_entries_beyond_bd0(X, x):
    fx = COPY()
    M, s, q = fx.code, 3, 1
    b0 = bd0(M, (x,), s, q)
    noisy = X.union([b0, b0 + 5, 3 * b0 + 1])
    base = X.below(b0)
    for v in range(0, b0, 3):
        assert next_pred(M, (x,), s, q, (), noisy, v) == next_pred(M, (x,), s, q, (), base, v)


def test_next_is_zero_above_the_state_row():
    fx = PARITY()
    M, x, s, q = fx.code, 5, 4, 1
    X = start_config(M, (x,), s, q)
    m = rows_needed((x,), s, q)
    assert all(next_pred(M, (x,), s, q, (), X, pair(i, j)) == 0
               for i in range(m + 1, m + 4) for j in range(12))


def test_codes_declaring_many_states_stay_cheap():
    spec = MachineSpec.build(1, 0, 0, 1 << 40, {(5, (MARK,)): (ACCEPT, (MARK,), (1,))})
    code = encode_machine(spec)
    assert code.bit_length() < 200
    assert decode_machine(code) == spec
    assert spec.is_working(5) and not spec.is_working(ACCEPT)
    assert len(spec.working_states) == (1 << 40) - 2
