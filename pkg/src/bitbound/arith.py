"""Gate-level unsigned arithmetic on little-endian wire lists.

Every function takes a :class:`~bitbound.circuit.Builder` and lists of
gate ids (bit 0 first) and returns new wire lists. Widths grow only where
the result needs it; callers trim with :func:`fit`.
"""

from __future__ import annotations

from typing import Sequence

from .circuit import Builder

Wires = list[int]


def const_bits(bl: Builder, value: int, width: int | None = None) -> Wires:
    width = value.bit_length() if width is None else width
    if value >> width:
        raise ValueError(f"{value} does not fit in {width} bits")
    return [bl.const((value >> i) & 1) for i in range(width)]


def fit(bl: Builder, a: Sequence[int], width: int) -> Wires:
    """Zero-extend or truncate to ``width`` bits."""
    a = list(a[:width])
    return a + [bl.const(0)] * (width - len(a))


def _pad2(bl: Builder, a, b) -> tuple[Wires, Wires]:
    w = max(len(a), len(b))
    return fit(bl, a, w), fit(bl, b, w)


def full_add(bl: Builder, x: int, y: int, c: int) -> tuple[int, int]:
    t = bl.XOR(x, y)
    return bl.XOR(t, c), bl.OR(bl.AND(x, y), bl.AND(t, c))


def add(bl: Builder, a, b, carry_in: int | None = None) -> Wires:
    a, b = _pad2(bl, a, b)
    c = bl.const(0) if carry_in is None else carry_in
    out = []
    for x, y in zip(a, b):
        s, c = full_add(bl, x, y, c)
        out.append(s)
    out.append(c)
    return out


def add_const(bl: Builder, a, value: int) -> Wires:
    return add(bl, a, const_bits(bl, value))


def sub(bl: Builder, a, b) -> tuple[Wires, int]:
    """``(a - b mod 2^w, borrow)`` with ``borrow = [a < b]``."""
    a, b = _pad2(bl, a, b)
    c = bl.const(1)
    out = []
    for x, y in zip(a, b):
        s, c = full_add(bl, x, bl.NOT(y), c)
        out.append(s)
    return out, bl.NOT(c)


def lt(bl: Builder, a, b) -> int:
    return sub(bl, a, b)[1]


def le(bl: Builder, a, b) -> int:
    return bl.NOT(lt(bl, b, a))


def eq(bl: Builder, a, b) -> int:
    a, b = _pad2(bl, a, b)
    return bl.AND_all(bl.XNOR(x, y) for x, y in zip(a, b))


def eq_const(bl: Builder, a, value: int) -> int:
    if value >> len(a):
        return bl.const(0)
    return bl.AND_all(a[i] if (value >> i) & 1 else bl.NOT(a[i]) for i in range(len(a)))


def lt_const(bl: Builder, a, value: int) -> int:
    """``[a < value]`` by an MSB-first scan (no subtractor)."""
    if value >> len(a):
        return bl.const(1)
    res = bl.const(0)
    # walk from LSB up: res_k = [a[0..k] < value[0..k]]
    for i in range(len(a)):
        vb = (value >> i) & 1
        if vb:
            res = bl.OR(bl.NOT(a[i]), bl.AND(a[i], res))
        else:
            res = bl.AND(bl.NOT(a[i]), res)
    return res


def le_const(bl: Builder, a, value: int) -> int:
    return lt_const(bl, a, value + 1)


def mux(bl: Builder, sel: int, when1, when0) -> Wires:
    when1, when0 = _pad2(bl, when1, when0)
    return [bl.MUX(sel, x, y) for x, y in zip(when1, when0)]


def shr(a, k: int) -> Wires:
    return list(a[k:])


def shl(bl: Builder, a, k: int) -> Wires:
    return [bl.const(0)] * k + list(a)


def mul(bl: Builder, a, b) -> Wires:
    """Shift-and-add product, ``len(a) + len(b)`` bits."""
    w = len(a) + len(b)
    acc = fit(bl, [], w)
    for k, bk in enumerate(b):
        row = [bl.AND(x, bk) for x in a]
        acc = fit(bl, add(bl, acc, shl(bl, row, k)), w)
    return acc


def isqrt_rem(bl: Builder, a) -> tuple[Wires, Wires]:
    """Restoring square root: ``(r, a - r*r)`` with ``r = isqrt(a)``."""
    a = list(a)
    if len(a) % 2:
        a.append(bl.const(0))
    n = len(a) // 2
    root: Wires = []          # MSB-first growth, stored LSB-first
    rem: Wires = [bl.const(0)]
    for k in range(n - 1, -1, -1):
        # rem = rem*4 + next two bits
        rem = [a[2 * k], a[2 * k + 1]] + rem
        trial = [bl.const(1), bl.const(0)] + root  # 4*root + 1
        diff, borrow = sub(bl, rem, trial)
        ok = bl.NOT(borrow)
        rem = mux(bl, ok, diff, fit(bl, rem, len(diff)))
        rem = rem[: n + 2]
        root = [ok] + root
    return root, fit(bl, rem, n + 2)


def pair(bl: Builder, a, b) -> Wires:
    """Cantor pairing ``(a+b)(a+b+1)/2 + b``."""
    s = add(bl, a, b)
    s1 = add_const(bl, s, 1)
    prod = mul(bl, s, s1)
    return add(bl, shr(prod, 1), b)


def unpair(bl: Builder, z) -> tuple[Wires, Wires]:
    """Inverse pairing via one square root of ``8z+1``.

    With ``r = isqrt(8z+1)`` and remainder ``e``: ``d = (r-1)//2`` and
    ``8y = e`` for odd ``r``, ``8y = e + 2r - 1`` for even ``r``.
    """
    z8 = [bl.const(1), bl.const(0), bl.const(0)] + list(z)  # 8z + 1
    r, e = isqrt_rem(bl, z8)
    even = bl.NOT(r[0])
    two_r_minus_1 = sub(bl, shl(bl, r, 1), [bl.const(1)])[0]
    extra = [bl.AND(even, w) for w in two_r_minus_1]
    y8 = add(bl, e, extra)
    y = shr(y8, 3)
    d = shr(sub(bl, r, [bl.const(1)])[0], 1)
    x, _ = sub(bl, d, y)
    return trim_to(bl, x, len(z)), trim_to(bl, y, len(z))


def trim_to(bl: Builder, a, width: int) -> Wires:
    return fit(bl, a, width)


def length_onehot(bl: Builder, x) -> list[int]:
    """``out[l] = [bitlen(x) == l]`` for ``l = 0..len(x)``."""
    n = len(x)
    out = [bl.const(0)] * (n + 1)
    higher_zero = bl.const(1)
    for l in range(n, 0, -1):
        out[l] = bl.AND(higher_zero, x[l - 1])
        higher_zero = bl.AND(higher_zero, bl.NOT(x[l - 1]))
    out[0] = higher_zero
    return out


def value_of(bits: Sequence[int]) -> int:
    """Helper for tests: little-endian 0/1 list to int."""
    return sum(int(b) << i for i, b in enumerate(bits))


def tuple_pack(bl: Builder, parts: Sequence[Sequence[int]]) -> Wires:
    """Right-nested tuple code of wire lists."""
    acc = list(parts[-1])
    for p in reversed(parts[:-1]):
        acc = pair(bl, p, acc)
    return acc


def tuple_unpack(bl: Builder, z, k: int) -> list[Wires]:
    out = []
    for _ in range(k - 1):
        a, z = unpair(bl, z)
        out.append(a)
    out.append(list(z))
    return out
