"""Fixture machines used throughout the tests and the CLI corpus."""

from __future__ import annotations

from dataclasses import dataclass, field

from .encoding import NatSet
from .machine import (ACCEPT, BLANK, L, MARK, ONE, QUERY, R, REJECT, S, START,
                      ZERO, MachineSpec, encode_machine)
from .terms import WitnessTerms

BITS = (ZERO, ONE)


@dataclass(frozen=True)
class Fixture:
    name: str
    spec: MachineSpec
    witness: WitnessTerms
    oracles: tuple[NatSet, ...] = ()
    note: str = ""
    tags: frozenset = field(default_factory=frozenset)

    @property
    def code(self) -> int:
        return encode_machine(self.spec)


def parity_spec() -> MachineSpec:
    """Accepts inputs with an odd number of 1-bits. State 3 = odd so far."""
    even, odd = START, 3
    tr = {}
    for st in (even, odd):
        tr[(st, (MARK,))] = (st, (MARK,), (R,))
        tr[(st, (ZERO,))] = (st, (ZERO,), (R,))
        tr[(st, (ONE,))] = (odd if st == even else even, (ONE,), (R,))
    tr[(even, (BLANK,))] = (REJECT, (BLANK,), (S,))
    tr[(odd, (BLANK,))] = (ACCEPT, (BLANK,), (S,))
    return MachineSpec.build(1, 0, 0, 4, tr)


def copy_spec() -> MachineSpec:
    """Copies the input onto the work tape, then accepts."""
    tr = {(START, (MARK, MARK)): (START, (MARK, MARK), (R, R))}
    for b in BITS:
        tr[(START, (b, BLANK))] = (START, (b, b), (R, R))
    tr[(START, (BLANK, BLANK))] = (ACCEPT, (BLANK, BLANK), (S, S))
    return MachineSpec.build(1, 0, 1, 3, tr)


def loop_spec(t: int) -> MachineSpec:
    """Sits on the end marker and halts (accepting) at configuration ``t``."""
    if t < 1:
        raise ValueError("LOOP needs t >= 1")
    chain = [START] + list(range(3, t + 2)) + [ACCEPT]
    tr = {(a, (MARK,)): (b, (MARK,), (S,)) for a, b in zip(chain, chain[1:])}
    return MachineSpec.build(1, 0, 0, max(3, t + 2), tr)


def oracle_spec() -> MachineSpec:
    """Copies x onto the oracle tape, asks ``x in X``, answers accordingly."""
    tr = {(START, (MARK, MARK)): (START, (MARK, MARK), (R, R))}
    for b in BITS:
        tr[(START, (b, BLANK))] = (START, (b, b), (R, R))
    tr[(START, (BLANK, BLANK))] = (QUERY, (BLANK, BLANK), (S, S))
    return MachineSpec.build(1, 1, 0, 4, tr, query_targets=(REJECT, ACCEPT))


def counter_spec() -> MachineSpec:
    """Lays out |x| zeros on the work tape and counts through all 2^|x|
    values in place (least significant digit rightmost), accepting on
    overflow. Exponential time, linear space."""
    incr, ret = 3, 4
    tr = {(START, (MARK, MARK)): (START, (MARK, MARK), (R, R))}
    for b in BITS:
        tr[(START, (b, BLANK))] = (START, (b, ZERO), (R, R))
    tr[(START, (BLANK, BLANK))] = (incr, (BLANK, BLANK), (S, L))
    tr[(incr, (BLANK, ONE))] = (incr, (BLANK, ZERO), (S, L))
    tr[(incr, (BLANK, ZERO))] = (ret, (BLANK, ONE), (S, R))
    tr[(incr, (BLANK, MARK))] = (ACCEPT, (BLANK, MARK), (S, S))
    for b in BITS:
        tr[(ret, (BLANK, b))] = (ret, (BLANK, b), (S, R))
    tr[(ret, (BLANK, BLANK))] = (incr, (BLANK, BLANK), (S, L))
    return MachineSpec.build(1, 0, 1, 5, tr)


# odd numbers and a few evens: enough to make answers input-dependent
ORACLE_SET = NatSet([1, 2, 3, 5, 7, 8, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61])


def PARITY() -> Fixture:
    return Fixture("PARITY", parity_spec(), WitnessTerms.exp("len(x)+3"),
                   note="odd number of 1-bits", tags=frozenset({"exp", "pspace"}))


def COPY() -> Fixture:
    return Fixture("COPY", copy_spec(), WitnessTerms.exp("len(x)+3"),
                   note="copy input to work tape", tags=frozenset({"exp"}))


def LOOP(t: int = 4) -> Fixture:
    return Fixture(f"LOOP_{t}", loop_spec(t), WitnessTerms.exp(f"{t + 1}"),
                   note=f"halts after exactly {t} steps", tags=frozenset({"exp", "pspace"}))


def ORACLE(oracle: NatSet = ORACLE_SET) -> Fixture:
    return Fixture("ORACLE", oracle_spec(),
                   WitnessTerms.general("len(x)+4", "1", "2**(len(x)+2)"),
                   oracles=(oracle,), note="accepts x iff x is in the oracle set",
                   tags=frozenset({"oracle"}))


def COUNTER() -> Fixture:
    return Fixture("COUNTER", counter_spec(), WitnessTerms.pspace("2**(len(x)+2)+4"),
                   note="in-place binary counter", tags=frozenset({"pspace", "exp"}))


def all_fixtures() -> list[Fixture]:
    return [PARITY(), COPY(), LOOP(2), LOOP(4), ORACLE(), COUNTER()]


def by_name(name: str) -> Fixture:
    name = name.upper()
    if name.startswith("LOOP"):
        _, _, t = name.partition("_")
        return LOOP(int(t) if t else 4)
    table = {"PARITY": PARITY, "COPY": COPY, "ORACLE": ORACLE, "COUNTER": COUNTER}
    if name not in table:
        raise KeyError(f"unknown fixture {name!r}")
    return table[name]()
