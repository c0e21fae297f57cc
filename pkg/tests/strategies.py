"""Hypothesis strategies shared by the test modules."""

from itertools import product

from hypothesis import strategies as st

from bitbound.machine import HALTING, INPUT, ORACLE, WORK, MachineSpec, _options
from bitbound.encoding import NatSet


@st.composite
def machines(draw, max_l=1, max_w=1, max_states=6):
    k = 1
    l = draw(st.integers(0, max_l))
    w = draw(st.integers(0, max_w))
    T = k + l + w
    kinds = [INPUT] * k + [ORACLE] * l + [WORK] * w
    n_states = draw(st.integers(4 if l else 3, max_states))
    targets = tuple(draw(st.integers(0, n_states - 1)) for _ in range(1 << l)) if l else ()
    working = [s for s in range(n_states) if s not in HALTING and not (l and s == 3)]
    table = {}
    for state in working:
        for scanned in product(range(4), repeat=T):
            if not draw(st.booleans()):
                continue
            new = draw(st.integers(0, n_states - 1))
            writes, moves = [], []
            for kind, a in zip(kinds, scanned):
                b, d = draw(st.sampled_from(_options(kind, a)))
                writes.append(b)
                moves.append(d)
            table[(state, scanned)] = (new, tuple(writes), tuple(moves))
    return MachineSpec.build(k, l, w, n_states, table, targets)


def natsets(max_value=1 << 16, max_size=40):
    return st.lists(st.integers(0, max_value), max_size=max_size).map(NatSet)
