"""The universal machine U: closed-form schedule and phase-exact simulation.

U works on ``y = (M, inputs, t, s, q)``. After a preparation phase of
``r0`` steps it runs rounds ``u = 0..t``; round ``u`` fills cells
``1..s0`` of one configuration tape (``s0 = bd0``) with the bits of the
start configuration (``u = 0``) or of the successor of the configuration
on the other tape, simulating the step machine once per cell. Every step
of the step machine pays one query-resolution sweep over the other tape.
A failing step sets a sticky flag; U accepts iff the flag ends at 0.

Phase layout (all costs in steps)::

    round  : 1 | s0 cells of t3 | clock pass 2|t|+2 | return s0+1 | 1
    cell   : |t0| sub-steps of t1 | 1 | unary return |t0|+1 | counter 2|s0|+2 | 1
    substep: 1 | s0 sweep cells of 2|s0|+2 | return s0+1 | 1
    wrap-up: clock pass 2|t|+2 | 1
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .encoding import NatSet, bd0 as bd0_of, bitlen, input_length, rows_needed
from .machine import (decode_machine, plan_bit, plan_config, plan_step, start_config,
                      succ_query_bound)
from .trace import Trace, context, explain_computation

# exponent published for the time/space bound t*(s+n)^c
RESOURCE_EXPONENT = 10

DETAIL_LEVELS = ("rounds", "sweeps")


def input_size(M: int, inputs: Sequence[int], t: int, s: int, q: int) -> int:
    """``n = |y|``, the total binary length of U's input."""
    return bitlen(M) + input_length(inputs) + bitlen(t) + bitlen(s) + bitlen(q)


def prep_time(n: int) -> int:
    return 8 * (n + 4) ** 2


def reject_time(M: int) -> int:
    """Time at which the preparation phase rejects an unsuitable code."""
    return bitlen(M) ** 2 + 2


@dataclass(frozen=True)
class Schedule:
    M: int
    inputs: tuple[int, ...]
    t: int
    s: int
    q: int
    s0: int
    t0: int
    r0: int
    t1: int
    t2: int
    t3: int
    t4: int
    q0: int
    t5: int

    @property
    def ls(self) -> int:
        return bitlen(self.s0)

    @property
    def lt(self) -> int:
        return bitlen(self.t)

    @property
    def L0(self) -> int:
        return bitlen(self.t0)

    @property
    def rounds(self) -> int:
        return self.t + 1

    @property
    def n(self) -> int:
        return input_size(self.M, self.inputs, self.t, self.s, self.q)

    def r_u(self, u: int) -> int:
        return self.r0 + u * self.t4

    def r_ui(self, u: int, i: int) -> int:
        return self.r_u(u) + 1 + i * self.t3

    def r_uij(self, u: int, i: int, j: int) -> int:
        return self.r_ui(u, i) + j * self.t1

    def r_uijp(self, u: int, i: int, j: int, p: int) -> int:
        return self.r_uij(u, i, j) + 1 + (2 * self.ls + 2) * p

    def sweep_grid(self, u: int, i: int) -> np.ndarray:
        """``r_uijp`` for all ``j < |t0|, p < s0`` as an int64 array."""
        j = np.arange(self.L0, dtype=np.int64)[:, None]
        p = np.arange(self.s0, dtype=np.int64)[None, :]
        return self.r_ui(u, i) + j * self.t1 + 1 + (2 * self.ls + 2) * p

    def space(self) -> int:
        """Cells used on a configuration tape: marker, ``s0`` bits, blank."""
        return self.s0 + 2

    def as_dict(self) -> dict:
        return {"s0": self.s0, "t0": self.t0, "len_t0": self.L0, "r0": self.r0,
                "t1": self.t1, "t2": self.t2, "t3": self.t3, "t4": self.t4,
                "q0": self.q0, "t5": self.t5, "rounds": self.rounds, "n": self.n}


def step_bound(M: int, inputs: Sequence[int], s: int, q: int) -> int:
    """``t0``: every step-machine simulation finishes in ``|t0|`` sub-steps."""
    return (1 << succ_query_bound(M, inputs, s, q)) - 1


def phase_lengths(s0: int, len_t0: int, len_t: int) -> tuple[int, int, int, int, int]:
    """``(t1, t2, t3, t4, q0)``: sweep, sub-step, cell, round and wrap-up lengths."""
    ls = bitlen(s0)
    t1 = 1 + (2 * ls + 2) * s0 + (s0 + 1) + 1
    t2 = 1 + len_t0 * t1 + (len_t0 + 1)
    t3 = (2 * ls + 2) + t2 + 1
    t4 = (2 * len_t + 2) + 1 + s0 * t3 + (s0 + 1) + 1
    q0 = (2 * len_t + 2) + 1
    return t1, t2, t3, t4, q0


def schedule(M: int, inputs: Sequence[int], t: int, s: int, q: int) -> Schedule:
    inputs = tuple(inputs)
    s0 = bd0_of(M, inputs, s, q)
    t0 = step_bound(M, inputs, s, q)
    r0 = prep_time(input_size(M, inputs, t, s, q))
    t1, t2, t3, t4, q0 = phase_lengths(s0, bitlen(t0), bitlen(t))
    t5 = r0 + (t + 1) * t4 + q0
    return Schedule(M, inputs, t, s, q, s0, t0, r0, t1, t2, t3, t4, q0, t5)


def resource_bound(t: int, s: int, n: int, c: int = RESOURCE_EXPONENT) -> int:
    """``t*(s+n)^c``; at ``t = 0`` the single round needs ``(t+1)``."""
    return max(t, 1) * (s + n) ** c


# ------------------------------------------------------------------ traces

@dataclass(eq=False)
class UTrace:
    """Phase-level record of one U computation.

    ``tapes[u]`` is the configuration written in round ``u`` (as the set of
    ``i`` whose cell ``i+1`` holds 1), ``flags[u]`` the flag after round
    ``u``. ``round_starts`` has one entry per round plus the wrap-up start;
    ``cell_starts[u, i]`` is when round ``u`` starts filling cell ``i+1``.
    """

    y: tuple
    suitable: bool
    tapes: tuple[NatSet, ...]
    flags: tuple[int, ...]
    round_starts: tuple[int, ...]
    cell_starts: np.ndarray
    end_time: int
    verdict: str
    fail_round: int | None = None
    fail_reason: str | None = None
    oracles: tuple = ()
    audit: dict = field(default_factory=dict)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UTrace):
            return NotImplemented
        return (self.y == other.y and self.suitable == other.suitable
                and self.tapes == other.tapes and self.flags == other.flags
                and self.round_starts == other.round_starts
                and np.array_equal(self.cell_starts, other.cell_starts)
                and self.end_time == other.end_time and self.verdict == other.verdict)

    @property
    def accepted(self) -> bool:
        return self.verdict == "accept"

    @property
    def t(self) -> int:
        return self.y[2]

    def flag(self) -> int:
        return self.flags[-1] if self.flags else 0

    def summary(self) -> dict:
        return {"verdict": self.verdict, "suitable": self.suitable, "time": self.end_time,
                "rounds": len(self.tapes), "flags": list(self.flags),
                "fail_round": self.fail_round, "fail_reason": self.fail_reason,
                "round_starts": list(self.round_starts)}


SweepSink = Callable[[int, int, np.ndarray], None]


class _SweepReader:
    """Answers ``v in X`` by a query-resolution sweep, one sub-step per query."""

    def __init__(self, tape: np.ndarray, sched: Schedule, clock: int, grid: np.ndarray):
        self.tape = tape
        self.sched = sched
        self.clock = clock
        self.grid = grid
        self.j = 0
        self.step = 2 * sched.ls + 2

    def substep(self, z: int) -> int:
        if self.j >= self.sched.L0:
            raise RuntimeError("step machine exceeded its sub-step budget")
        z = z if z < self.sched.s0 else self.sched.s0  # unreachable cell: answer 0
        answer, self.clock = kernels.sweep(self.tape, z, self.sched.s0, self.step,
                                           self.clock, self.grid[self.j])
        self.j += 1
        return int(answer)

    def __call__(self, v: int) -> bool:
        return bool(self.substep(v))

    def pad(self) -> None:
        while self.j < self.sched.L0:
            self.substep(1)


def _tape_array(X: NatSet, s0: int) -> np.ndarray:
    tape = np.zeros(s0 + 2, dtype=np.uint8)
    idx = np.fromiter((v for v in X if v < s0), dtype=np.int64)
    tape[idx + 1] = 1
    return tape


def u_run(M: int, inputs: Sequence[int], t: int, s: int, q: int,
          oracles: Sequence[NatSet] = (), detail: str = "rounds",
          sink: SweepSink | None = None) -> UTrace:
    """Simulate U on ``(M, inputs, t, s, q)``.

    ``detail="rounds"`` evaluates the step machine once per round and
    charges the per-cell phases by their step counts; ``"sweeps"`` runs
    the step machine separately for every cell, answering each of its
    queries with a real sweep, and hands the observed read times of each
    cell (shape ``(|t0|, s0)``) to ``sink(u, i, times)``.
    """
    if detail not in DETAIL_LEVELS:
        raise ValueError(f"detail must be one of {DETAIL_LEVELS}")
    inputs, oracles = tuple(inputs), tuple(oracles)
    y = (M, inputs, t, s, q)
    spec = decode_machine(M)
    if spec is None or spec.k != len(inputs) or spec.l != len(oracles):
        return UTrace(y, False, (), (), (), np.zeros((0, 0), np.int64), reject_time(M),
                      "reject", None, "unsuitable machine", oracles)
    sch = schedule(M, inputs, t, s, q)
    s0, L0, ls, lt = sch.s0, sch.L0, sch.ls, sch.lt
    counter = 2 * ls + 2
    sweep_cost = 1 + counter * s0 + (s0 + 1) + 1
    prep = _prep_cost(M, inputs, t, sch)
    if prep > sch.r0:
        raise RuntimeError(f"preparation needs {prep} > r0 = {sch.r0} steps")
    clock = sch.r0
    tapes: list[NatSet] = []
    flags: list[int] = []
    starts: list[int] = []
    cells = np.zeros((t + 1, s0), dtype=np.int64)
    flag = 0
    fail_round = fail_reason = None
    m = rows_needed(inputs, s, q)
    audit = {"max_queries": 0}
    for u in range(t + 1):
        starts.append(clock)
        clock += 1  # skip cell 0
        prev = tapes[-1] if tapes else None
        if detail == "rounds":
            written, reason, used = _round_rounds(M, inputs, s, q, oracles, prev, u)
            audit["max_queries"] = max(audit["max_queries"], used)
            if used > L0:
                raise RuntimeError("step machine exceeded its sub-step budget")
            per_cell = L0 * sweep_cost + 1 + (L0 + 1) + counter + 1
            cells[u] = clock + per_cell * np.arange(s0, dtype=np.int64)
            clock += per_cell * s0
        else:
            written, reason, clock = _round_sweeps(M, inputs, s, q, oracles, prev, u, sch,
                                                   clock, cells[u], sink, audit, m)
        if reason is not None and not flag:
            flag, fail_round, fail_reason = 1, u, reason
        tapes.append(written)
        flags.append(flag)
        clock += 2 * lt + 2   # binary clock pass: compare with t, increment
        clock += s0 + 1       # configuration tape head back to cell 0
        clock += 1            # enter the next round
    starts.append(clock)
    clock += 2 * lt + 2 + 1
    return UTrace(y, True, tuple(tapes), tuple(flags), tuple(starts), cells, clock,
                  "accept" if flag == 0 else "reject", fail_round, fail_reason, oracles, audit)


def _prep_cost(M: int, inputs, t: int, sch: Schedule) -> int:
    """Steps the preparation phase actually needs (then padded to ``r0``)."""
    check = bitlen(M) ** 2 + 2
    write_s0 = 2 * sch.ls + 2 * bitlen(sch.s0)
    counters = 2 * sch.ls + bitlen(t) + sch.L0
    return check + write_s0 + counters + 4


def _round_rounds(M, inputs, s, q, oracles, prev: NatSet | None, u: int):
    if u == 0:
        return start_config(M, inputs, s, q), None, 0
    counted = []

    def read(v: int) -> bool:
        counted.append(v)
        return v in prev

    plan = plan_step(M, inputs, s, q, oracles, read)
    used = len(counted) + 1  # plus the final output read of plan_bit
    if plan.fail:
        return NatSet(), plan.fail, used
    return plan_config(plan, prev.__contains__).to_set(plan.m), None, used


def _round_sweeps(M, inputs, s, q, oracles, prev, u, sch: Schedule, clock: int,
                  cell_row: np.ndarray, sink, audit, m):
    s0, L0 = sch.s0, sch.L0
    counter = 2 * sch.ls + 2
    tape = _tape_array(prev, s0) if prev is not None else np.zeros(s0 + 2, np.uint8)
    bits = np.zeros(s0, dtype=bool)
    reason = None
    start = start_config(M, inputs, s, q) if u == 0 else None
    for i in range(s0):
        cell_row[i] = clock
        grid = np.empty((L0, s0), dtype=np.int64)
        rd = _SweepReader(tape, sch, clock, grid)
        if u == 0:
            bit = int(i in start)
            cell_fail = None
        else:
            plan = plan_step(M, inputs, s, q, oracles, rd)
            cell_fail = plan.fail
            bit = 0 if plan.fail else plan_bit(plan, rd, i)
        audit["max_queries"] = max(audit["max_queries"], rd.j)
        rd.pad()
        if sink is not None:
            sink(u, i, grid)
        if i == 0:
            reason = cell_fail
        elif (cell_fail is None) != (reason is None):
            raise RuntimeError("fail decision depends on the queried cell")
        bits[i] = bool(bit) and reason is None
        clock = rd.clock + 1 + (L0 + 1) + counter + 1
    written = NatSet._from_sorted(tuple(int(v) for v in np.flatnonzero(bits)))
    return written, reason, clock


# ------------------------------------------------------- validation and F/G

class UTraceError(ValueError):
    pass


def timing_errors(Z: UTrace) -> list[str]:
    """Differences between the recorded phase times and the schedule."""
    M, inputs, t, s, q = Z.y
    if not Z.suitable:
        return [] if Z.end_time == reject_time(M) else ["rejection time"]
    sch = schedule(M, inputs, t, s, q)
    errs = []
    for u, st in enumerate(Z.round_starts[:-1]):
        if st != sch.r_u(u):
            errs.append(f"round {u} starts at {st}, schedule says {sch.r_u(u)}")
    if Z.round_starts[-1] != sch.r_u(t + 1):
        errs.append("wrap-up start")
    expect = sch.r_ui(0, 0) + np.arange(t + 1, dtype=np.int64)[:, None] * sch.t4 \
        + np.arange(sch.s0, dtype=np.int64)[None, :] * sch.t3
    if Z.cell_starts.shape != expect.shape or not np.array_equal(Z.cell_starts, expect):
        errs.append("cell start times differ from r_ui")
    if Z.end_time != sch.t5:
        errs.append(f"total time {Z.end_time} != t5 = {sch.t5}")
    return errs


def validate(Z: UTrace, recompute: bool = True) -> list[str]:
    """Diagnose ``Z`` as an accepting U computation; empty list if it is."""
    errs = timing_errors(Z)
    if not Z.suitable:
        return errs + ["U rejected in preparation"]
    M, inputs, t, s, q = Z.y
    if len(Z.tapes) != t + 1 or len(Z.flags) != t + 1:
        errs.append("wrong number of rounds")
        return errs
    if any(b < a for a, b in zip(Z.flags, Z.flags[1:])):
        errs.append("flag bit reset")
    if Z.flag():
        errs.append(f"flag set in round {Z.fail_round}")
    if Z.verdict != ("accept" if Z.flag() == 0 else "reject"):
        errs.append("verdict does not match the flag")
    if Z.verdict != "accept":
        errs.append("U rejects")
    if recompute and not errs:
        ref = u_run(M, inputs, t, s, q, Z.oracles)
        for u, (a, b) in enumerate(zip(Z.tapes, ref.tapes)):
            if a != b:
                errs.append(f"round {u} tape is not what U writes")
                break
    return errs


def g_map(Z: UTrace) -> Trace:
    """The configurations U wrote, one per round, as an M computation."""
    errs = validate(Z)
    if errs:
        raise UTraceError("; ".join(errs))
    M, inputs, t, s, q = Z.y
    return Trace(NatSet.assemble(list(Z.tapes)), t, context(M, inputs, s, q, Z.oracles))


def f_map(Y: Trace) -> UTrace:
    """The accepting U computation whose round ``u`` writes ``Y_u``."""
    ctx = Y.ctx
    verdict = explain_computation(Y.set, Y.t, ctx)
    if not verdict.ok:
        raise UTraceError(f"not a computation: {verdict.conjunct} at {verdict.index}")
    t = Y.t
    sch = schedule(ctx.M, ctx.inputs, t, ctx.s, ctx.q)
    slices = Y.slices()
    starts = tuple(sch.r_u(u) for u in range(t + 2))
    cells = sch.r_ui(0, 0) + np.arange(t + 1, dtype=np.int64)[:, None] * sch.t4 \
        + np.arange(sch.s0, dtype=np.int64)[None, :] * sch.t3
    return UTrace((ctx.M, ctx.inputs, t, ctx.s, ctx.q), True, tuple(slices), (0,) * (t + 1),
                  starts, cells, sch.t5, "accept", None, None, ctx.oracles)


class SweepAudit:
    """Sink comparing observed sweep read times with ``r_uijp``."""

    def __init__(self, sched: Schedule):
        self.sched = sched
        self.cells = 0
        self.reads = 0
        self.mismatches: list[tuple[int, int]] = []

    def __call__(self, u: int, i: int, times: np.ndarray) -> None:
        self.cells += 1
        self.reads += times.size
        if not np.array_equal(times, self.sched.sweep_grid(u, i)):
            self.mismatches.append((u, i))

    @property
    def ok(self) -> bool:
        return not self.mismatches
