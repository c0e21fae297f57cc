import pytest

from bitbound import arith
from bitbound.circuit import Builder, eval_tuple, truth_table
from bitbound.encoding import pair, tuple_code, unpair


def _eq_circuit(width_in, outputs, expected_width, make):
    """Circuit over (a, b, e) that is 1 iff ``make(a, b) == e``."""
    bl = Builder()
    a, b = bl.inputs(width_in), bl.inputs(width_in)
    e = bl.inputs(expected_width)
    got = make(bl, a, b)
    return bl.build(arith.eq(bl, arith.fit(bl, got, expected_width), e))


@pytest.mark.parametrize("width", [3, 4])
def test_pair_circuit_matches_pairing(width):
    top = pair((1 << width) - 1, (1 << width) - 1)
    ew = top.bit_length()
    c = _eq_circuit(width, None, ew, lambda bl, a, b: arith.pair(bl, a, b))
    for x in range(1 << width):
        for y in range(1 << width):
            assert eval_tuple(c, (x, y, pair(x, y))) == 1
            assert eval_tuple(c, (x, y, (pair(x, y) + 1) % (1 << ew))) == 0


def test_pair_circuit_truth_table_has_one_row_per_argument():
    width = 3
    ew = pair(7, 7).bit_length()
    c = _eq_circuit(width, None, ew, lambda bl, a, b: arith.pair(bl, a, b))
    assert len(truth_table(c)) == 1 << (2 * width)


def test_unpair_circuit():
    width = 8
    bl = Builder()
    z = bl.inputs(width)
    left, right = arith.unpair(bl, z)
    i_exp, j_exp = bl.inputs(width), bl.inputs(width)
    c = bl.build(bl.AND(arith.eq(bl, arith.fit(bl, left, width), i_exp),
                        arith.eq(bl, arith.fit(bl, right, width), j_exp)))
    for v in range(1 << width):
        i, j = unpair(v)
        assert eval_tuple(c, (v, i, j)) == 1
        assert eval_tuple(c, (v, i, (j + 1) % 256)) == 0


def test_tuple_pack_circuit():
    bl = Builder()
    parts = [bl.inputs(2) for _ in range(3)]
    packed = arith.tuple_pack(bl, parts)
    ew = tuple_code(3, 3, 3).bit_length()
    e = bl.inputs(ew)
    c = bl.build(arith.eq(bl, arith.fit(bl, packed, ew), e))
    for a in range(4):
        for b in range(4):
            for d in range(4):
                assert eval_tuple(c, (a, b, d, tuple_code(a, b, d))) == 1


@pytest.mark.parametrize("op,ref", [("add", lambda a, b: a + b), ("mul", lambda a, b: a * b)])
def test_add_and_mul(op, ref):
    width = 4
    c = _eq_circuit(width, None, 2 * width + 1, lambda bl, a, b: getattr(arith, op)(bl, a, b))
    for a in range(16):
        for b in range(16):
            assert eval_tuple(c, (a, b, ref(a, b))) == 1


def test_comparisons():
    bl = Builder()
    a, b = bl.inputs(4), bl.inputs(4)
    lt = bl.build(arith.lt(bl, a, b))
    bl2 = Builder()
    a2 = bl2.inputs(4)
    ltc = bl2.build(arith.lt_const(bl2, a2, 9))
    for x in range(16):
        assert eval_tuple(ltc, (x,)) == (x < 9)
        for y in range(16):
            assert eval_tuple(lt, (x, y)) == (x < y)


def test_isqrt():
    bl = Builder()
    a = bl.inputs(8)
    root, rem = arith.isqrt_rem(bl, a)
    r_exp = bl.inputs(8)
    c = bl.build(arith.eq(bl, arith.fit(bl, root, 8), r_exp))
    import math
    for v in range(256):
        assert eval_tuple(c, (v, math.isqrt(v))) == 1
