"""Boolean circuits over {CONST0, CONST1, INPUT, NOT, AND, OR}.

A circuit has input blocks of fixed widths (one per tuple component,
bit ``b`` of block ``k`` is bit ``b`` of the k-th argument, least
significant first), a topologically ordered gate list and one output gate.

Number code (bits least significant first)::

    gamma(F) | s | B | out | w_1 .. w_B | (op, a, b) * s | sentinel 1

with every field ``F = |max(s, W, B)|`` bits wide (``W`` = total input
width) and opcodes 3 bits wide. Unused operand fields are zero. Restricting
a block away shortens the header, so codes of restrictions are smaller.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .encoding import NatSet, bitlen

CONST0, CONST1, INPUT, NOT, AND, OR = range(6)
OP_NAMES = ("CONST0", "CONST1", "INPUT", "NOT", "AND", "OR")
_BUFFER_WORDS = 1 << 23  # scratch budget per evaluation chunk (64 MiB)


class CircuitError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Circuit:
    layout: tuple[int, ...]
    op: np.ndarray  # int8
    a: np.ndarray   # int32
    b: np.ndarray   # int32
    out: int

    def __post_init__(self):
        for arr in (self.op, self.a, self.b):
            arr.setflags(write=False)

    @property
    def size(self) -> int:
        return int(self.op.shape[0])

    @property
    def width(self) -> int:
        return sum(self.layout)

    @property
    def offsets(self) -> list[int]:
        out, acc = [], 0
        for w in self.layout:
            out.append(acc)
            acc += w
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return (self.layout == other.layout and self.out == other.out
                and np.array_equal(self.op, other.op) and np.array_equal(self.a, other.a)
                and np.array_equal(self.b, other.b))

    def __hash__(self) -> int:
        return hash((self.layout, self.out, self.op.tobytes(), self.a.tobytes(), self.b.tobytes()))

    def validate(self) -> None:
        s = self.size
        if s == 0:
            raise CircuitError("empty circuit")
        if not 0 <= self.out < s:
            raise CircuitError("output gate out of range")
        o = self.op.astype(np.int64)
        x = self.a.astype(np.int64)
        y = self.b.astype(np.int64)
        g = np.arange(s)
        ok = np.zeros(s, dtype=bool)
        const = (o == CONST0) | (o == CONST1)
        ok |= const & (x == 0) & (y == 0)
        ok |= (o == INPUT) & (x >= 0) & (x < self.width) & (y == 0)
        ok |= (o == NOT) & (x >= 0) & (x < g) & (y == 0)
        ok |= ((o == AND) | (o == OR)) & (x >= 0) & (x < g) & (y >= 0) & (y < g)
        if not ok.all():
            bad = int(np.flatnonzero(~ok)[0])
            raise CircuitError(f"gate {bad} ({o[bad]}, {x[bad]}, {y[bad]}) is malformed")

    def field_width(self) -> int:
        return bitlen(max(self.size, self.width, len(self.layout)))

    def code(self) -> int:
        cached = self.__dict__.get("_code")
        if cached is None:
            cached = encode(self)
            object.__setattr__(self, "_code", cached)
        return cached

    def disassemble(self) -> str:
        lines = [f"layout {' '.join(map(str, self.layout)) or '-'}",
                 f"size {self.size}", f"output {self.out}"]
        offs = self.offsets
        for g in range(self.size):
            o, x, y = int(self.op[g]), int(self.a[g]), int(self.b[g])
            if o == INPUT:
                blk = max(k for k, off in enumerate(offs) if off <= x)
                arg = f"block {blk} bit {x - offs[blk]}"
            elif o == NOT:
                arg = str(x)
            elif o in (AND, OR):
                arg = f"{x} {y}"
            else:
                arg = ""
            lines.append(f"{g}: {OP_NAMES[o]} {arg}".rstrip())
        return "\n".join(lines)


def from_gates(layout: Sequence[int], gates: Sequence[tuple[int, int, int]], out: int) -> Circuit:
    g = np.array(gates, dtype=np.int64).reshape(-1, 3)
    c = Circuit(tuple(int(w) for w in layout), g[:, 0].astype(np.int8),
                g[:, 1].astype(np.int32), g[:, 2].astype(np.int32), int(out))
    c.validate()
    return c


# ------------------------------------------------------------------ coding

def size_bound_bits(s: int) -> int:
    """Codes of size-``s`` circuits must be below ``2**size_bound_bits(s)``."""
    return 10 * s * bitlen(s)


def _gamma_len(v: int) -> int:
    return 2 * bitlen(v) - 1


def code_length(c: Circuit) -> int:
    """Bit length of ``encode(c)``, sentinel included."""
    F = c.field_width()
    return _gamma_len(F) + F * (3 + len(c.layout)) + c.size * (3 + 2 * F) + 1


def _field_bits(values: np.ndarray, width: int) -> np.ndarray:
    """(len, width) little-endian bit matrix."""
    v = values.astype(np.int64)[:, None]
    return ((v >> np.arange(width, dtype=np.int64)[None, :]) & 1).astype(np.uint8)


def _bits_to_int(bits: np.ndarray) -> int:
    return int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")


def _int_to_bits(value: int, width: int) -> np.ndarray:
    raw = value.to_bytes((max(width, value.bit_length()) + 7) // 8, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:width]


def encode(c: Circuit, check_bound: bool = True) -> int:
    c.validate()
    F = c.field_width()
    e = bitlen(F) - 1
    parts = [(0, e), (1, 1), (F & ((1 << e) - 1), e),
             (c.size, F), (len(c.layout), F), (c.out, F)]
    parts += [(w, F) for w in c.layout]
    value, pos = 0, 0
    for v, wd in parts:
        value |= v << pos
        pos += wd
    # gate records as one vectorized pack
    rec_w = 3 + 2 * F
    fields = np.concatenate([_field_bits(c.op, 3), _field_bits(c.a, F), _field_bits(c.b, F)], axis=1)
    gate_bits = _bits_to_int(fields.reshape(-1))
    value |= gate_bits << pos
    pos += rec_w * c.size
    code = value | (1 << pos)
    if check_bound and code >= 1 << size_bound_bits(c.size):
        raise CircuitError(f"code of {pos + 1} bits exceeds the 10*s*|s| bound for s={c.size}")
    return code


_decode_cache: dict[int, Circuit | None] = {}


def decode(n: int) -> Circuit | None:
    """The circuit coded by ``n`` or ``None``."""
    if n in _decode_cache:
        return _decode_cache[n]
    res = _decode(n)
    if len(_decode_cache) > 256:
        _decode_cache.clear()
    _decode_cache[n] = res
    return res


def _decode(n: int) -> Circuit | None:
    if n <= 1:
        return None
    limit = bitlen(n) - 1
    pos = 0

    def take(w: int) -> int:
        nonlocal pos
        if pos + w > limit:
            raise CircuitError("truncated")
        v = (n >> pos) & ((1 << w) - 1)
        pos += w
        return v

    try:
        e = 0
        while take(1) == 0:
            e += 1
            if e > 40:
                return None
        F = (1 << e) | take(e)
        s, B, out = take(F), take(F), take(F)
        layout = tuple(take(F) for _ in range(B))
        rec_w = 3 + 2 * F
        if pos + rec_w * s != limit or s == 0:
            return None
        if F > 62:
            return None
        recs = _int_to_bits(n >> pos, rec_w * s).reshape(s, rec_w)
        weights = [1 << k for k in range(F)]
        op = recs[:, :3].astype(np.int64) @ np.array([1, 2, 4], dtype=np.int64)
        a = recs[:, 3:3 + F].astype(np.int64) @ np.array(weights, dtype=np.int64)
        b = recs[:, 3 + F:].astype(np.int64) @ np.array(weights, dtype=np.int64)
        if (op > OR).any():
            return None
        c = Circuit(layout, op.astype(np.int8), a.astype(np.int32), b.astype(np.int32), out)
        c.validate()
    except CircuitError:
        return None
    if c.field_width() != F:
        return None
    return c


def as_circuit(C: "Circuit | int") -> Circuit | None:
    return C if isinstance(C, Circuit) else decode(C)


# -------------------------------------------------------------- evaluation

def _pack_lanes(bits: np.ndarray) -> np.ndarray:
    """(rows, lanes) bool -> (rows, ceil(lanes/64)) uint64, lane j at bit j."""
    rows, lanes = bits.shape
    words = (lanes + 63) // 64
    padded = np.zeros((rows, words * 64), dtype=np.uint8)
    padded[:, :lanes] = bits
    return np.packbits(padded, axis=1, bitorder="little").view(np.uint64).reshape(rows, words)


def _unpack_lanes(words: np.ndarray, lanes: int) -> np.ndarray:
    raw = np.ascontiguousarray(words).view(np.uint8)
    return np.unpackbits(raw, bitorder="little")[:lanes].astype(bool)


def _chunk_words(c: Circuit) -> int:
    return max(1, min(1 << 10, _BUFFER_WORDS // max(1, c.size)))


def _int_bits(values: Sequence[int], width: int) -> np.ndarray:
    """(width, len(values)) bool matrix of the low ``width`` bits."""
    out = np.zeros((width, len(values)), dtype=bool)
    if width == 0 or not len(values):
        return out
    if width <= 63:
        arr = np.array(values, dtype=np.int64)
        shifts = np.arange(width, dtype=np.int64)[:, None]
        return ((arr[None, :] >> shifts) & 1).astype(bool)
    nbytes = (width + 7) // 8
    mask = (1 << width) - 1
    raw = b"".join((v & mask).to_bytes(nbytes, "little") for v in values)
    grid = np.frombuffer(raw, dtype=np.uint8).reshape(len(values), nbytes)
    return np.unpackbits(grid, axis=1, bitorder="little")[:, :width].T.astype(bool)


def eval_bitmatrix(c: Circuit, bits: np.ndarray) -> np.ndarray:
    """Evaluate on a (width, points) bool matrix; returns bool per point."""
    W, P = bits.shape
    if W != c.width:
        raise CircuitError("input matrix width mismatch")
    res = np.zeros(P, dtype=bool)
    step = _chunk_words(c) * 64
    op = np.ascontiguousarray(c.op)
    a = np.ascontiguousarray(c.a)
    b = np.ascontiguousarray(c.b)
    for lo in range(0, P, step):
        hi = min(P, lo + step)
        packed = _pack_lanes(bits[:, lo:hi]) if W else np.zeros((0, (hi - lo + 63) // 64), np.uint64)
        packed = np.ascontiguousarray(packed)
        val = np.empty((c.size, packed.shape[1]), dtype=np.uint64)
        kernels.eval_bits(op, a, b, packed, val)
        res[lo:hi] = _unpack_lanes(val[c.out], hi - lo)
    return res


def eval_many(C: Circuit | int, points: Sequence[Sequence[int]]) -> np.ndarray:
    """``eval_tuple`` over many points at once (0 on malformed points)."""
    c = as_circuit(C)
    P = len(points)
    if c is None:
        return np.zeros(P, dtype=bool)
    B = len(c.layout)
    ok = np.ones(P, dtype=bool)
    rows = []
    for k, w in enumerate(c.layout):
        col = []
        for j, pt in enumerate(points):
            if len(pt) != B:
                ok[j] = False
                col.append(0)
                continue
            v = pt[k]
            if v < 0 or v >> w:
                ok[j] = False
                v = 0
            col.append(v)
        rows.append(_int_bits(col, w))
    bits = np.concatenate(rows, axis=0) if rows else np.zeros((0, P), dtype=bool)
    return eval_bitmatrix(c, bits) & ok


def eval_tuple(C: Circuit | int, xs: Sequence[int]) -> int:
    return int(eval_many(C, [tuple(xs)])[0])


def split_single(c: Circuit, x: int) -> tuple[int, ...]:
    out = []
    for w in c.layout:
        out.append(x & ((1 << w) - 1))
        x >>= w
    return tuple(out)


def eval(C: Circuit | int, x: int) -> int:  # noqa: A001 - mirrors the math name
    """Single-argument evaluation: the blocks read consecutive bit ranges."""
    c = as_circuit(C)
    if c is None or x < 0 or x >> c.width:
        return 0
    return eval_tuple(c, split_single(c, x))


def eval_ints(C: Circuit | int, xs: Sequence[int]) -> np.ndarray:
    c = as_circuit(C)
    if c is None:
        return np.zeros(len(xs), dtype=bool)
    return eval_many(c, [split_single(c, x) if 0 <= x and not x >> c.width else (-1,) * len(c.layout)
                         for x in xs])


# ------------------------------------------------------------- restriction

def restrict(C: Circuit | int, xs: Sequence[int]) -> Circuit:
    """Fix the first ``len(xs)`` blocks to ``xs`` (gate slots are kept)."""
    c = as_circuit(C)
    if c is None:
        raise CircuitError("not a circuit code")
    r = len(xs)
    if r > len(c.layout):
        raise CircuitError("more arguments than input blocks")
    fixed_w = sum(c.layout[:r])
    fixed = 0
    shift = 0
    for x, w in zip(xs, c.layout):
        if x < 0 or x >> w:
            raise CircuitError(f"argument {x} does not fit a {w}-bit block")
        fixed |= x << shift
        shift += w
    op = c.op.copy()
    a = c.a.copy()
    inp = np.flatnonzero(op == INPUT)
    idx = a[inp].astype(np.int64)
    low = idx < fixed_w
    for g, i in zip(inp[low], idx[low]):
        op[g] = CONST1 if (fixed >> int(i)) & 1 else CONST0
        a[g] = 0
    a[inp[~low]] -= fixed_w
    return Circuit(c.layout[r:], op, a, c.b.copy(), c.out)


# ------------------------------------------------------------ truth tables

TT_WIDTH_LIMIT = 24


ENUMERATE_BUDGET = 1 << 36  # gate-lane evaluations allowed for direct enumeration

_LOW_PATTERNS = np.array([0xAAAAAAAAAAAAAAAA, 0xCCCCCCCCCCCCCCCC, 0xF0F0F0F0F0F0F0F0,
                          0xFF00FF00FF00FF00, 0xFFFF0000FFFF0000, 0xFFFFFFFF00000000],
                         dtype=np.uint64)


def _counter_lanes(c: Circuit, prefixes: np.ndarray, free: int) -> np.ndarray:
    """Outputs on every completion of each prefix: (len(prefixes), 2^free) bool.

    Lane ``p * 2^free + j`` holds the input ``(prefix_p << free) | j``; the
    packed input words are built from counter patterns, not per point.
    """
    W = c.width
    P = prefixes.size
    if free < 6:
        xs = (prefixes[:, None] << free | np.arange(1 << free, dtype=np.int64)[None, :]).reshape(-1)
        bits = ((xs[None, :] >> np.arange(W, dtype=np.int64)[:, None]) & 1).astype(bool)
        return eval_bitmatrix(c, bits).reshape(P, 1 << free)
    shift = free - 6                         # each prefix spans 2^shift words
    total = P << shift
    out = np.empty(P << free, dtype=bool)
    op = np.ascontiguousarray(c.op)
    a = np.ascontiguousarray(c.a)
    b = np.ascontiguousarray(c.b)
    full = np.uint64(0xFFFFFFFFFFFFFFFF)
    zero = np.uint64(0)
    cw = _chunk_words(c)
    for g0 in range(0, total, cw):
        gw = np.arange(g0, min(total, g0 + cw), dtype=np.int64)
        pre = prefixes[gw >> shift]
        widx = gw & ((1 << shift) - 1)
        packed = np.empty((W, gw.size), dtype=np.uint64)
        for i in range(W):
            if i < 6:
                packed[i] = _LOW_PATTERNS[i]
            elif i < free:
                packed[i] = np.where((widx >> (i - 6)) & 1, full, zero)
            else:
                packed[i] = np.where((pre >> (i - free)) & 1, full, zero)
        val = np.empty((c.size, gw.size), dtype=np.uint64)
        kernels.eval_bits(op, a, b, packed, val)
        out[g0 * 64:(g0 + gw.size) * 64] = _unpack_lanes(val[c.out], gw.size * 64)
    return out.reshape(P, 1 << free)


def truth_ranges(C: Circuit | int, limit: int | None = TT_WIDTH_LIMIT) -> list[tuple[int, int]]:
    """Maximal ranges ``[lo, hi)`` of accepted inputs, in increasing order.

    Inputs are explored as cubes fixing the high bits, MSB first. Each
    level is evaluated three-valued in one bitsliced pass; decided cubes
    are emitted or dropped and undecided ones split on the next lower bit.
    When splitting stops paying off (few free bits left, or most cubes stay
    undecided) the remaining cubes are enumerated outright.
    """
    c = as_circuit(C)
    if c is None:
        return []
    W = c.width
    if limit is not None and W > limit:
        raise CircuitError(f"truth table width {W} exceeds the limit {limit}")
    op = np.ascontiguousarray(c.op)
    a = np.ascontiguousarray(c.a)
    b = np.ascontiguousarray(c.b)
    ranges: list[tuple[int, int]] = []
    prefixes = np.zeros(1, dtype=np.int64)
    step = _chunk_words(c) * 64
    undecided_ratio = 0.0
    for k in range(W + 1):
        free = W - k
        if prefixes.size == 0:
            break
        cost = c.size * (prefixes.size << free)
        crowded = prefixes.size >= 4096 and undecided_ratio > 0.75
        if free <= 3 or (crowded and cost <= ENUMERATE_BUDGET):
            hits = _counter_lanes(c, prefixes, free)
            for p, row in zip(prefixes.tolist(), hits):
                for j in np.flatnonzero(row).tolist():
                    ranges.append(((p << free) | j, ((p << free) | j) + 1))
            break
        keep = []
        for lo in range(0, prefixes.size, step):
            pre = prefixes[lo: lo + step]
            P = pre.size
            in_one = np.zeros((W, (P + 63) // 64), dtype=np.uint64)
            in_zero = np.zeros((W, (P + 63) // 64), dtype=np.uint64)
            for i in range(free, W):
                bit = ((pre >> (i - free)) & 1).astype(bool)
                in_one[i] = _pack_lanes(bit[None, :])[0]
                in_zero[i] = _pack_lanes(~bit[None, :])[0]
            L = in_one.shape[1]
            one = np.empty((c.size, L), dtype=np.uint64)
            zero = np.empty((c.size, L), dtype=np.uint64)
            kernels.eval_planes(op, a, b, in_one, in_zero, one, zero)
            is1 = _unpack_lanes(one[c.out], P)
            is0 = _unpack_lanes(zero[c.out], P)
            for p in pre[is1].tolist():
                ranges.append((p << free, (p + 1) << free))
            und = pre[~is1 & ~is0]
            if und.size:
                if free == 0:
                    raise CircuitError("three-valued evaluation left a full assignment undecided")
                keep.append(und)
        if not keep:
            break
        und = np.concatenate(keep)
        undecided_ratio = und.size / prefixes.size
        prefixes = np.concatenate([und * 2, und * 2 + 1])
    ranges.sort()
    merged: list[tuple[int, int]] = []
    for lo, hi in ranges:
        if merged and merged[-1][1] == lo:
            merged[-1] = (merged[-1][0], hi)
        else:
            merged.append((lo, hi))
    return merged


def truth_table(C: Circuit | int, limit: int | None = TT_WIDTH_LIMIT) -> NatSet:
    """``{v | eval(C, v) = 1}`` over the circuit's full input width."""
    out: list[int] = []
    for lo, hi in truth_ranges(C, limit):
        out.extend(range(lo, hi))
    return NatSet._from_sorted(tuple(out))


def truth_table_brute(C: Circuit | int) -> NatSet:
    """Reference: evaluate every input point."""
    c = as_circuit(C)
    if c is None:
        return NatSet()
    W = c.width
    xs = np.arange(1 << W, dtype=np.int64)
    bits = ((xs[None, :] >> np.arange(W)[:, None]) & 1).astype(bool)
    res = eval_bitmatrix(c, bits)
    return NatSet._from_sorted(tuple(int(v) for v in np.flatnonzero(res)))


# ------------------------------------------------------------------ builder

class Builder:
    """Gate-list builder with structural hashing and constant folding."""

    def __init__(self):
        self.ops: list[int] = []
        self.aa: list[int] = []
        self.bb: list[int] = []
        self.layout: list[int] = []
        self._hash: dict[tuple[int, int, int], int] = {}
        self._neg: dict[int, int] = {}
        self._const: dict[int, int] = {}
        self._width = 0

    def _add(self, o: int, x: int = 0, y: int = 0) -> int:
        key = (o, x, y)
        g = self._hash.get(key)
        if g is None:
            g = len(self.ops)
            self.ops.append(o)
            self.aa.append(x)
            self.bb.append(y)
            self._hash[key] = g
            if o == CONST0:
                self._const[0] = g
            elif o == CONST1:
                self._const[1] = g
        return g

    def const(self, v: int | bool) -> int:
        return self._add(CONST1 if v else CONST0)

    def const_value(self, g: int) -> int | None:
        o = self.ops[g]
        if o == CONST0:
            return 0
        if o == CONST1:
            return 1
        return None

    def inputs(self, width: int) -> list[int]:
        base = self._width
        self.layout.append(width)
        self._width += width
        return [self._add(INPUT, base + i) for i in range(width)]

    def NOT(self, x: int) -> int:
        cv = self.const_value(x)
        if cv is not None:
            return self.const(1 - cv)
        if self.ops[x] == NOT:
            return self.aa[x]
        g = self._neg.get(x)
        if g is None:
            g = self._add(NOT, x)
            self._neg[x] = g
        return g

    def _complementary(self, x: int, y: int) -> bool:
        return (self.ops[x] == NOT and self.aa[x] == y) or (self.ops[y] == NOT and self.aa[y] == x)

    def AND(self, x: int, y: int) -> int:
        cx, cy = self.const_value(x), self.const_value(y)
        if cx == 0 or cy == 0:
            return self.const(0)
        if cx == 1:
            return y
        if cy == 1:
            return x
        if x == y:
            return x
        if self._complementary(x, y):
            return self.const(0)
        if x > y:
            x, y = y, x
        return self._add(AND, x, y)

    def OR(self, x: int, y: int) -> int:
        cx, cy = self.const_value(x), self.const_value(y)
        if cx == 1 or cy == 1:
            return self.const(1)
        if cx == 0:
            return y
        if cy == 0:
            return x
        if x == y:
            return x
        if self._complementary(x, y):
            return self.const(1)
        if x > y:
            x, y = y, x
        return self._add(OR, x, y)

    def XOR(self, x: int, y: int) -> int:
        cx, cy = self.const_value(x), self.const_value(y)
        if cx is not None:
            return self.NOT(y) if cx else y
        if cy is not None:
            return self.NOT(x) if cy else x
        if x == y:
            return self.const(0)
        return self.OR(self.AND(x, self.NOT(y)), self.AND(self.NOT(x), y))

    def XNOR(self, x: int, y: int) -> int:
        return self.NOT(self.XOR(x, y))

    def MUX(self, sel: int, when1: int, when0: int) -> int:
        cs = self.const_value(sel)
        if cs is not None:
            return when1 if cs else when0
        if when1 == when0:
            return when1
        return self.OR(self.AND(sel, when1), self.AND(self.NOT(sel), when0))

    def AND_all(self, xs: Iterable[int]) -> int:
        xs = list(xs)
        if not xs:
            return self.const(1)
        while len(xs) > 1:
            nxt = [self.AND(xs[i], xs[i + 1]) for i in range(0, len(xs) - 1, 2)]
            if len(xs) % 2:
                nxt.append(xs[-1])
            xs = nxt
        return xs[0]

    def OR_all(self, xs: Iterable[int]) -> int:
        xs = list(xs)
        if not xs:
            return self.const(0)
        while len(xs) > 1:
            nxt = [self.OR(xs[i], xs[i + 1]) for i in range(0, len(xs) - 1, 2)]
            if len(xs) % 2:
                nxt.append(xs[-1])
            xs = nxt
        return xs[0]

    def AND_chain(self, xs: Sequence[int]) -> int:
        """Left-to-right AND chain; shares prefixes under structural hashing."""
        acc = self.const(1)
        for x in xs:
            acc = self.AND(acc, x)
        return acc

    def import_circuit(self, c: Circuit, block_wires: Sequence[Sequence[int]]) -> int:
        """Inline ``c`` with its input blocks wired to existing gates."""
        if len(block_wires) != len(c.layout):
            raise CircuitError("block count mismatch on import")
        flat = [w for blk in block_wires for w in blk]
        if len(flat) != c.width:
            raise CircuitError("input width mismatch on import")
        m = [0] * c.size
        for g, (o, x, y) in enumerate(zip(c.op.tolist(), c.a.tolist(), c.b.tolist())):
            if o == CONST0:
                m[g] = self.const(0)
            elif o == CONST1:
                m[g] = self.const(1)
            elif o == INPUT:
                m[g] = flat[x]
            elif o == NOT:
                m[g] = self.NOT(m[x])
            elif o == AND:
                m[g] = self.AND(m[x], m[y])
            else:
                m[g] = self.OR(m[x], m[y])
        return m[c.out]

    def build(self, out: int, prune: bool = True) -> Circuit:
        """Finish with output ``out``; drops gates outside the output cone
        (input gates are always kept)."""
        ops, aa, bb = self.ops, self.aa, self.bb
        n = len(ops)
        if not prune:
            keep = list(range(n))
        else:
            live = bytearray(n)
            live[out] = 1
            for g in range(n - 1, -1, -1):
                if not live[g]:
                    if ops[g] == INPUT:
                        live[g] = 1
                    continue
                o = ops[g]
                if o == NOT:
                    live[aa[g]] = 1
                elif o in (AND, OR):
                    live[aa[g]] = 1
                    live[bb[g]] = 1
            keep = [g for g in range(n) if live[g]]
        remap = {g: i for i, g in enumerate(keep)}
        gates = []
        for g in keep:
            o = ops[g]
            if o in (CONST0, CONST1):
                gates.append((o, 0, 0))
            elif o == INPUT:
                gates.append((o, aa[g], 0))
            elif o == NOT:
                gates.append((o, remap[aa[g]], 0))
            else:
                gates.append((o, remap[aa[g]], remap[bb[g]]))
        return from_gates(self.layout, gates, remap[out])


# ------------------------------------------------------------- small zoo

def and2() -> Circuit:
    bl = Builder()
    (x,), (y,) = bl.inputs(1), bl.inputs(1)
    return bl.build(bl.AND(x, y))


def and2_single() -> Circuit:
    bl = Builder()
    x, y = bl.inputs(2)
    return bl.build(bl.AND(x, y))


def not1() -> Circuit:
    bl = Builder()
    (x,) = bl.inputs(1)
    return bl.build(bl.NOT(x))


def const(value: int, layout: Sequence[int] = ()) -> Circuit:
    bl = Builder()
    for w in layout:
        bl.inputs(w)
    return bl.build(bl.const(value))


def negate(C: Circuit | int) -> Circuit:
    c = as_circuit(C)
    bl = Builder()
    blocks = [bl.inputs(w) for w in c.layout]
    return bl.build(bl.NOT(bl.import_circuit(c, blocks)))


def flip_point(C: Circuit | int, point: Sequence[int]) -> Circuit:
    """``C`` with its output inverted exactly at ``point``."""
    c = as_circuit(C)
    bl = Builder()
    blocks = [bl.inputs(w) for w in c.layout]
    outg = bl.import_circuit(c, blocks)
    hit = []
    for blk, v in zip(blocks, point):
        hit.extend(w if (v >> i) & 1 else bl.NOT(w) for i, w in enumerate(blk))
    return bl.build(bl.XOR(outg, bl.AND_all(hit)))


def random_circuit(rng, layout: Sequence[int], gates: int) -> Circuit:
    """Uniform-ish random circuit over the full basis (no folding)."""
    W = sum(layout)
    g_list: list[tuple[int, int, int]] = [(INPUT, i, 0) for i in range(W)]
    if not g_list:
        g_list.append((CONST0 + rng.randrange(2), 0, 0))
    while len(g_list) < W + gates or len(g_list) == 0:
        n = len(g_list)
        o = rng.choice((NOT, AND, OR, AND, OR, CONST0, CONST1))
        if o in (CONST0, CONST1):
            g_list.append((o, 0, 0))
        elif o == NOT:
            g_list.append((o, rng.randrange(n), 0))
        else:
            g_list.append((o, rng.randrange(n), rng.randrange(n)))
    return from_gates(layout, g_list, len(g_list) - 1)
