import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bitbound import kernels
from bitbound.circuit import random_circuit, truth_table
from bitbound.kernels import _fallback

needs_compiled = pytest.mark.skipif(kernels.compiled is None, reason="extension not built")


def _arrays(c):
    return (np.ascontiguousarray(c.op), np.ascontiguousarray(c.a), np.ascontiguousarray(c.b))


def _random_words(rng, rows, lanes):
    return np.array([[rng.getrandbits(64) for _ in range(lanes)] for _ in range(rows)],
                    dtype=np.uint64)


@needs_compiled
@given(st.integers(0, 10**6), st.integers(1, 12), st.integers(0, 80), st.integers(1, 5))
def test_eval_bits_backends_agree(seed, width, gates, lanes):
    rng = random.Random(seed)
    c = random_circuit(rng, (width,), gates)
    op, a, b = _arrays(c)
    inputs = _random_words(rng, width, lanes)
    want = np.empty((c.size, lanes), dtype=np.uint64)
    got = np.empty((c.size, lanes), dtype=np.uint64)
    _fallback.eval_bits(op, a, b, inputs, want)
    kernels.compiled.eval_bits(op, a, b, inputs, got)
    assert np.array_equal(want, got)


@needs_compiled
@given(st.integers(0, 10**6), st.integers(1, 10), st.integers(0, 60))
def test_eval_planes_backends_agree(seed, width, gates):
    rng = random.Random(seed)
    c = random_circuit(rng, (width,), gates)
    op, a, b = _arrays(c)
    known = _random_words(rng, width, 2)
    value = _random_words(rng, width, 2)
    in_one, in_zero = known & value, known & ~value
    planes = [np.empty((c.size, 2), dtype=np.uint64) for _ in range(4)]
    _fallback.eval_planes(op, a, b, in_one, in_zero, planes[0], planes[1])
    kernels.compiled.eval_planes(op, a, b, in_one, in_zero, planes[2], planes[3])
    assert np.array_equal(planes[0], planes[2]) and np.array_equal(planes[1], planes[3])
    assert not np.any(planes[0] & planes[1])


@needs_compiled
@pytest.mark.parametrize("z", [-1, 0, 3, 9, 10])
def test_sweep_backends_agree(z):
    tape = np.array([3, 1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0], dtype=np.uint8)
    outs = [np.empty(10, dtype=np.int64) for _ in range(2)]
    r1 = _fallback.sweep(tape, z, 10, 7, 100, outs[0])
    r2 = kernels.compiled.sweep(tape, z, 10, 7, 100, outs[1])
    assert tuple(r1) == tuple(r2)
    assert np.array_equal(outs[0], outs[1])


def test_truth_tables_do_not_depend_on_the_backend():
    c = random_circuit(random.Random(4), (11,), 70)
    before = kernels.BACKEND
    try:
        kernels.use("numpy")
        slow = truth_table(c)
        if kernels.compiled is not None:
            kernels.use("compiled")
            assert truth_table(c) == slow
    finally:
        kernels.use(before)


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.use("gpu")
