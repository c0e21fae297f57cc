"""Pure numpy versions of the compiled kernels (same signatures)."""

from __future__ import annotations

import numpy as np

OP_CONST0, OP_CONST1, OP_INPUT, OP_NOT, OP_AND, OP_OR = range(6)
FULL = np.uint64(0xFFFFFFFFFFFFFFFF)

_level_cache: dict = {}


def _levels(op, a, b):
    """Group gates by depth so each group is one vectorized operation."""
    key = (id(op), op.shape[0])
    hit = _level_cache.get(key)
    if hit is not None and hit[0] is op:
        return hit[1]
    s = op.shape[0]
    depth = np.zeros(s, dtype=np.int64)
    binary = (op == OP_AND) | (op == OP_OR)
    unary = op == OP_NOT
    for g in np.flatnonzero(binary | unary):
        d = depth[a[g]]
        if binary[g]:
            d = max(d, depth[b[g]])
        depth[g] = d + 1
    groups = []
    for d in range(int(depth.max(initial=0)) + 1):
        at = depth == d
        groups.append(tuple(np.flatnonzero(at & (op == code)) for code in range(6)))
    if len(_level_cache) > 64:
        _level_cache.clear()
    _level_cache[key] = (op, groups)
    return groups


def eval_bits(op, a, b, inputs, val):
    for grp in _levels(op, a, b):
        c0, c1, inp, neg, conj, disj = grp
        if c0.size:
            val[c0] = 0
        if c1.size:
            val[c1] = FULL
        if inp.size:
            val[inp] = inputs[a[inp]]
        if neg.size:
            val[neg] = ~val[a[neg]]
        if conj.size:
            val[conj] = val[a[conj]] & val[b[conj]]
        if disj.size:
            val[disj] = val[a[disj]] | val[b[disj]]


def eval_planes(op, a, b, in_one, in_zero, one, zero):
    for grp in _levels(op, a, b):
        c0, c1, inp, neg, conj, disj = grp
        if c0.size:
            one[c0] = 0
            zero[c0] = FULL
        if c1.size:
            one[c1] = FULL
            zero[c1] = 0
        if inp.size:
            one[inp] = in_one[a[inp]]
            zero[inp] = in_zero[a[inp]]
        if neg.size:
            x = a[neg]
            one[neg], zero[neg] = zero[x], one[x]
        if conj.size:
            x, y = a[conj], b[conj]
            one[conj] = one[x] & one[y]
            zero[conj] = zero[x] | zero[y]
        if disj.size:
            x, y = a[disj], b[disj]
            one[disj] = one[x] | one[y]
            zero[disj] = zero[x] & zero[y]


def sweep(tape, z, s0, step, clock, out=None):
    if out is not None:
        out[:s0] = clock + 1 + step * np.arange(s0, dtype=np.int64)
    answer = int(tape[z + 1]) if 0 <= z < s0 else 0
    return answer, clock + 1 + step * s0 + (s0 + 1) + 1
