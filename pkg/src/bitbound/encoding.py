"""Naturals, Cantor pairing, bit length, finite sets of naturals and the
configuration/computation bounds.

All values are plain Python ints (exact, unbounded). ``NatSet`` is an
immutable sorted set with pairing-aware slicing.
"""

from __future__ import annotations

from bisect import bisect_left
from math import isqrt
from typing import Iterable, Iterator, Sequence

__all__ = [
    "pair",
    "unpair",
    "bitlen",
    "tuple_code",
    "untuple",
    "is_log_gt1",
    "NatSet",
    "rows_needed",
    "bd0",
    "bd",
    "input_length",
    "slice_set",
]


def pair(x: int, y: int) -> int:
    """Cantor pairing ``(x+y)(x+y+1)/2 + y``."""
    if x < 0 or y < 0:
        raise ValueError("pair is defined on naturals only")
    d = x + y
    return d * (d + 1) // 2 + y


def unpair(z: int) -> tuple[int, int]:
    """Inverse of :func:`pair`; total on all naturals."""
    if z < 0:
        raise ValueError("unpair is defined on naturals only")
    d = (isqrt(8 * z + 1) - 1) // 2
    y = z - d * (d + 1) // 2
    return d - y, y


def bitlen(x: int) -> int:
    """Binary length, with ``bitlen(0) == 0``."""
    if x < 0:
        raise ValueError("bitlen is defined on naturals only")
    return x.bit_length()


def tuple_code(*xs: int) -> int:
    """Right-nested tuple code ``<a, b, c> = pair(a, pair(b, c))``."""
    if not xs:
        raise ValueError("empty tuple has no code")
    acc = xs[-1]
    for x in reversed(xs[:-1]):
        acc = pair(x, acc)
    return acc


def untuple(z: int, k: int) -> tuple[int, ...]:
    """Decode a right-nested k-tuple; every natural decodes."""
    if k < 1:
        raise ValueError("k must be positive")
    out = []
    for _ in range(k - 1):
        a, z = unpair(z)
        out.append(a)
    out.append(z)
    return tuple(out)


def is_log_gt1(n: int) -> bool:
    # every natural is the length of some number, so this is just n > 1
    return n > 1


def input_length(inputs: Sequence[int]) -> int:
    return sum(bitlen(x) for x in inputs)


def rows_needed(inputs: Sequence[int], s: int, q: int) -> int:
    """Row index of the state entry: ``max(s, |inputs|+2, |q|)``."""
    return max(s, input_length(inputs) + 2, bitlen(q))


def bd0(M: int, inputs: Sequence[int], s: int, q: int) -> int:
    if M <= 0:
        raise ValueError("machine code must be positive")
    return pair(rows_needed(inputs, s, q) + 1, bitlen(M))


def bd(M: int, inputs: Sequence[int], t: int, s: int, q: int) -> int:
    return pair(t, bd0(M, inputs, s, q))


class NatSet:
    """Finite immutable set of naturals, iterated in increasing order."""

    __slots__ = ("_items", "_members", "_hash")

    def __init__(self, elements: Iterable[int] = ()):
        members = frozenset(int(e) for e in elements)
        for e in members:
            if e < 0:
                raise ValueError("NatSet elements must be naturals")
        self._members = members
        self._items = tuple(sorted(members))
        self._hash = None

    @classmethod
    def _from_sorted(cls, items: tuple[int, ...]) -> "NatSet":
        obj = cls.__new__(cls)
        obj._items = items
        obj._members = frozenset(items)
        obj._hash = None
        return obj

    def __contains__(self, v: object) -> bool:
        return v in self._members

    def __iter__(self) -> Iterator[int]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __bool__(self) -> bool:
        return bool(self._items)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, NatSet):
            return self._members == other._members
        if isinstance(other, (set, frozenset)):
            return self._members == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._members)
        return self._hash

    def __repr__(self) -> str:
        if len(self._items) > 12:
            head = ", ".join(map(str, self._items[:12]))
            return f"NatSet({{{head}, ...}} |{len(self)}|)"
        return "NatSet({" + ", ".join(map(str, self._items)) + "})"

    @property
    def items(self) -> tuple[int, ...]:
        return self._items

    def max(self, default: int = -1) -> int:
        return self._items[-1] if self._items else default

    def below(self, bound: int) -> "NatSet":
        return NatSet._from_sorted(self._items[: bisect_left(self._items, bound)])

    def union(self, other: Iterable[int]) -> "NatSet":
        return NatSet(self._members.union(other))

    def flip(self, v: int) -> "NatSet":
        """Symmetric difference with ``{v}``."""
        return NatSet(self._members.symmetric_difference((v,)))

    def slice(self, i: int) -> "NatSet":
        return NatSet(y for x, y in map(unpair, self._items) if x == i)

    def slices(self) -> dict[int, "NatSet"]:
        groups: dict[int, list[int]] = {}
        for e in self._items:
            x, y = unpair(e)
            groups.setdefault(x, []).append(y)
        return {i: NatSet(v) for i, v in groups.items()}

    @staticmethod
    def assemble(slices: "dict[int, Iterable[int]] | Sequence[Iterable[int]]") -> "NatSet":
        """``{pair(i, v) | v in slices[i]}``."""
        pairs = slices.items() if isinstance(slices, dict) else enumerate(slices)
        return NatSet(pair(i, v) for i, vs in pairs for v in vs)

    def dumps(self) -> str:
        return "".join(f"{e}\n" for e in self._items)

    @staticmethod
    def loads(text: str) -> "NatSet":
        out = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if not line.isdigit():
                raise ValueError(f"line {lineno}: not a natural number: {line!r}")
            out.append(int(line))
        return NatSet(out)


def slice_set(Y: NatSet, i: int) -> NatSet:
    return Y.slice(i)
