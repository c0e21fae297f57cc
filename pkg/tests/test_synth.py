import random

import pytest

from bitbound.circuit import eval_tuple, eval_many
from bitbound.encoding import NatSet
from bitbound.fixtures import by_name
from bitbound.synth import (StepFamily, bounds_from_terms, compile_computation,
                            compile_predicate, reference_predicate)
from bitbound.trace import Fail, run


def _family(name, n):
    fx = by_name(name)
    return fx, StepFamily(fx.code, n, bounds_from_terms(fx.witness), fx.oracles)


def _sample_configs(fx, fam, rng, count):
    """Real configurations from traces plus random corruptions of them."""
    out = []
    for x in range(1 << fam.n):
        cls = fam.classes[x.bit_length()]
        Y = run(fx.code, (x,), cls.t, cls.s, cls.q, fx.oracles)
        if isinstance(Y, Fail):
            continue
        for i in range(Y.t + 1):
            X = Y.set.slice(i)
            out.append((x, X))
            bad = X.flip(rng.randrange(fam.config_width()))
            out.append((x, bad))
    rng.shuffle(out)
    return out[:count]


def _mask(X: NatSet) -> int:
    return sum(1 << v for v in X)


@pytest.mark.parametrize("name,n", [("PARITY", 2), ("COPY", 2), ("ORACLE", 2)])
def test_next_circuit_matches_reference(name, n):
    fx, fam = _family(name, n)
    rng = random.Random(1)
    circuit = compile_predicate("next", fam)
    ref = reference_predicate("next", fam)
    width = fam.config_width()
    for x, X in _sample_configs(fx, fam, rng, 40):
        X = X.below(width)
        pts = [(x, _mask(X), v) for v in range(width)]
        got = eval_many(circuit, pts)
        assert [int(g) for g in got] == [ref(x, X, v) for v in range(width)]


@pytest.mark.parametrize("name,n", [("PARITY", 2), ("LOOP_2", 2)])
def test_fail_circuit_matches_reference(name, n):
    fx, fam = _family(name, n)
    rng = random.Random(2)
    circuit = compile_predicate("fail", fam)
    ref = reference_predicate("fail", fam)
    for x, X in _sample_configs(fx, fam, rng, 60):
        X = X.below(fam.config_width())
        assert eval_tuple(circuit, (x, _mask(X))) == ref(x, X)


def test_fail_circuit_catches_garbage():
    fx, fam = _family("PARITY", 2)
    circuit = compile_predicate("fail", fam)
    ref = reference_predicate("fail", fam)
    rng = random.Random(3)
    width = fam.config_width()
    hits = 0
    for _ in range(200):
        x = rng.randrange(4)
        X = NatSet(v for v in range(width) if rng.random() < 0.3)
        expect = ref(x, X)
        hits += expect
        assert eval_tuple(circuit, (x, _mask(X))) == expect
    assert hits > 0


@pytest.mark.parametrize("name", ["PARITY", "COPY", "LOOP_2"])
def test_start_circuit_matches_reference(name):
    fx, fam = _family(name, 2)
    circuit = compile_predicate("start", fam)
    ref = reference_predicate("start", fam)
    for x in range(4):
        for v in range(1 << fam.position_width()):
            assert eval_tuple(circuit, (x, v)) == ref(x, v)


@pytest.mark.parametrize("name,n", [("PARITY", 2), ("PARITY", 3), ("LOOP_2", 2), ("COPY", 2),
                                    ("ORACLE", 2)])
def test_tableau_describes_the_run(name, n):
    fx, fam = _family(name, n)
    circuit = compile_computation(fam)
    width = fam.trace_width()
    for x in range(1 << n):
        cls = fam.classes[x.bit_length()]
        Y = run(fx.code, (x,), cls.t, cls.s, cls.q, fx.oracles)
        got = eval_many(circuit, [(x, v) for v in range(1 << width)])
        members = {v for v in range(1 << width) if got[v]}
        assert members == {v for v in Y.set if v < 1 << width}


def test_unknown_predicate_is_reported():
    from bitbound.circuit import CircuitError
    with pytest.raises(CircuitError):
        compile_predicate("no-such-predicate")
