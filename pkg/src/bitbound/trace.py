"""Computation traces: reference simulation, the computation predicate,
time/space/query extraction, classification and witness validation."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .encoding import NatSet, bd as bd_of, bd0 as bd0_of, pair, rows_needed, unpair
from .machine import (ACCEPT, HALTING, ORACLE, WORK, decode_machine,
                      locate_head, plan_config, plan_step, start_config, state_of_set)
from .terms import WitnessTerms


@dataclass(frozen=True)
class Context:
    """Everything a computation is relative to, except ``t``."""

    M: int
    inputs: tuple[int, ...]
    s: int
    q: int
    oracles: tuple[NatSet, ...] = ()

    @property
    def m(self) -> int:
        return rows_needed(self.inputs, self.s, self.q)

    @property
    def bd0(self) -> int:
        return bd0_of(self.M, self.inputs, self.s, self.q)

    def bd(self, t: int) -> int:
        return bd_of(self.M, self.inputs, t, self.s, self.q)


def context(M, inputs, s, q, oracles=()) -> Context:
    return Context(M, tuple(inputs), s, q, tuple(oracles))


@dataclass(frozen=True)
class Fail:
    """A run stopped because the step at configuration ``step`` failed."""

    step: int
    reason: str

    def __bool__(self) -> bool:
        return False

    @property
    def resource(self) -> str:
        if "work head" in self.reason:
            return "space"
        if "oracle head" in self.reason:
            return "query"
        return "other"


@dataclass(frozen=True)
class Trace:
    set: NatSet
    t: int
    ctx: Context

    @property
    def bd(self) -> int:
        return self.ctx.bd(self.t)

    @property
    def bd0(self) -> int:
        return self.ctx.bd0

    def slice(self, i: int) -> NatSet:
        return self.set.slice(i)

    def slices(self) -> list[NatSet]:
        by = self.set.slices()
        return [by.get(i, NatSet()) for i in range(self.t + 1)]

    def render(self) -> str:
        from .machine import decode_config
        out = []
        for i, X in enumerate(self.slices()):
            cfg = decode_config(X, self.ctx.M, self.ctx.inputs, self.ctx.s, self.ctx.q)
            out.append(f"-- configuration {i}\n{cfg.render()}")
        return "\n".join(out)


def _next_set(ctx: Context, X: NatSet):
    """(fail reason or None, successor set) for configuration set ``X``."""
    plan = plan_step(ctx.M, ctx.inputs, ctx.s, ctx.q, ctx.oracles, X.__contains__)
    if plan.fail:
        return plan.fail, NatSet()
    return None, plan_config(plan, X.__contains__).to_set(plan.m)


def run(M: int, inputs: Sequence[int], t: int, s: int, q: int,
        oracles: Sequence[NatSet] = ()) -> Trace | Fail:
    """Start configuration followed by ``t`` steps, or the first failure."""
    ctx = context(M, inputs, s, q, oracles)
    spec = decode_machine(M)
    if spec is None or spec.k != len(ctx.inputs) or spec.l != len(ctx.oracles):
        return Fail(0, "unsuitable machine")
    X = start_config(M, ctx.inputs, s, q)
    slices = [X]
    for i in range(t):
        reason, X = _next_set(ctx, X)
        if reason:
            return Fail(i, reason)
        slices.append(X)
    return Trace(NatSet.assemble(slices), t, ctx)


@dataclass(frozen=True)
class Verdict:
    ok: bool
    conjunct: str = ""
    index: int | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def explain_computation(Y: NatSet, t: int, ctx: Context, strict: bool = True) -> Verdict:
    """Evaluate the computation predicate conjunct by conjunct.

    Conjuncts: ``bounds`` (slice entries below bd0), ``start``, ``next``,
    ``fail`` and, when ``strict``, ``extent`` (nothing below bd outside
    slices 0..t).
    """
    b0 = ctx.bd0
    b = pair(t, b0)
    by: dict[int, list[int]] = {}
    for e in Y:
        i, v = unpair(e)
        if e < b and i <= t and v >= b0:
            return Verdict(False, "bounds", i, f"slice {i} holds {v} >= bd0 = {b0}")
        if strict and e < b and i > t:
            return Verdict(False, "extent", i, f"element {e} lies in slice {i} > t = {t}")
        if i <= t and v < b0:
            by.setdefault(i, []).append(v)
    slices = [NatSet(by.get(i, ())) for i in range(t + 1)]
    start = start_config(ctx.M, ctx.inputs, ctx.s, ctx.q)
    if slices[0] != start.below(b0):
        diff = sorted(set(slices[0]) ^ set(start))[0]
        return Verdict(False, "start", 0, f"slice 0 differs from the start configuration at {diff}")
    for i in range(t):
        reason, nxt = _next_set(ctx, slices[i])
        if reason:
            return Verdict(False, "fail", i, reason)
        if slices[i + 1] != nxt.below(b0):
            diff = sorted(set(slices[i + 1]) ^ set(nxt))[0]
            return Verdict(False, "next", i + 1, f"slice {i + 1} differs from the successor at {diff}")
    return Verdict(True)


def is_partial_computation(Y: Trace | NatSet, t: int | None = None, ctx: Context | None = None,
                           strict: bool = True) -> bool:
    if isinstance(Y, Trace):
        t = Y.t if t is None else t
        ctx = Y.ctx if ctx is None else ctx
        Y = Y.set
    return explain_computation(Y, t, ctx, strict).ok


def _slice_state(X: NatSet, ctx: Context) -> int:
    return state_of_set(X, ctx.M, ctx.inputs, ctx.s, ctx.q)


def time_of(Y: Trace) -> int:
    for i, X in enumerate(Y.slices()):
        if _slice_state(X, Y.ctx) in HALTING:
            return i
    return Y.t + 1


def _max_head(Y: Trace, kind: str) -> int:
    spec = decode_machine(Y.ctx.M)
    if spec is None:
        return 0
    taus = [tau for tau in range(spec.tapes) if spec.kind(tau) == kind]
    best = 0
    m = Y.ctx.m
    for X in Y.slices():
        for tau in taus:
            best = max(best, locate_head(X.__contains__, tau, m))
    return best


def space_of(Y: Trace) -> int:
    return _max_head(Y, WORK)


def query_of(Y: Trace) -> int:
    return _max_head(Y, ORACLE)


def final_state(Y: Trace) -> int:
    return _slice_state(Y.slice(Y.t), Y.ctx)


def classify(Y: Trace | Fail, witness: WitnessTerms | None = None) -> str:
    """``accepting``, ``rejecting``, ``non-halting`` (or ``fail``)."""
    if isinstance(Y, Fail):
        return "fail"
    if time_of(Y) > Y.t:
        return "non-halting"
    st = final_state(Y)
    return "accepting" if st == ACCEPT else "rejecting"


def run_witnessed(M: int, witness: WitnessTerms, inputs: Sequence[int],
                  oracles: Sequence[NatSet] = ()) -> Trace | Fail:
    t, s, q = witness.bounds(inputs)
    return run(M, inputs, t, s, q, oracles)


# ------------------------------------------------------------ witness check

@dataclass
class WitnessReport:
    ok: bool
    checked: int
    violation: dict | None = None
    worst: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


def default_samples(k: int = 1, bits: int = 6, extra: int = 32, seed: int = 0,
                    extra_bits: int = 10) -> list[tuple[int, ...]]:
    rng = random.Random(seed)
    grid = [(x,) * 1 for x in range(1 << bits)] if k == 1 else []
    if k != 1:
        from itertools import product
        per = max(1, bits // k)
        grid = list(product(range(1 << per), repeat=k))
    for _ in range(extra):
        grid.append(tuple(rng.randrange(1 << bits, 1 << extra_bits) for _ in range(k)))
    return grid


def check_witness(M: int, W: WitnessTerms, samples: Iterable[Sequence[int]] | None = None,
                  oracles: Sequence[NatSet] = ()) -> WitnessReport:
    """Check ``time < t0``, ``space < s0``, ``query < |q0|`` on samples.

    Each input is simulated against exactly ``(t0, s0, q0)``. This is
    decisive for every other choice of bounds: runs are prefixes of one
    another, a failing run exposes a head at ``s0`` (or ``|q0|``), and a
    surviving run halts before ``t0`` iff every time value stays below it.
    """
    spec = decode_machine(M)
    if spec is None:
        return WitnessReport(False, 0, {"reason": "not a machine code"})
    if samples is None:
        samples = default_samples(spec.k)
    worst = {"time_slack": None, "space_slack": None, "query_slack": None}
    n = 0
    for inputs in samples:
        inputs = tuple(inputs)
        n += 1
        t0, s0, q0 = W.bounds(inputs)
        qlen = q0.bit_length()
        Y = run(M, inputs, t0, s0, q0, oracles)
        if isinstance(Y, Fail):
            which = Y.resource
            bound = {"space": s0, "query": qlen}.get(which)
            return WitnessReport(False, n, {"inputs": list(inputs), "which": which,
                                            "step": Y.step, "reason": Y.reason,
                                            "bound": bound}, worst)
        tm, sp, qu = time_of(Y), space_of(Y), query_of(Y)
        for name, val, bound in (("time", tm, t0), ("space", sp, s0), ("query", qu, qlen)):
            if not val < bound:
                return WitnessReport(False, n, {"inputs": list(inputs), "which": name,
                                                "value": val, "bound": bound}, worst)
            key = f"{name}_slack"
            slack = bound - val
            if worst[key] is None or slack < worst[key]:
                worst[key] = slack
    return WitnessReport(True, n, None, worst)


# ---------------------------------------------------------- mutation sweep

def _np_unpair(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d = np.floor((np.sqrt(8.0 * v.astype(np.float64) + 1.0) - 1.0) / 2.0).astype(np.int64)
    tri = d * (d + 1) // 2
    lo = tri > v
    d[lo] -= 1
    tri = d * (d + 1) // 2
    hi = (d + 1) * (d + 2) // 2 <= v
    d[hi] += 1
    tri = d * (d + 1) // 2
    y = v - tri
    return d - y, y


@dataclass
class MutationReport:
    total: int
    rejected: int
    by_conjunct: dict
    survivors: list

    @property
    def ok(self) -> bool:
        return self.total == self.rejected


def mutation_sweep(Y: Trace, strict: bool = True, chunk: int = 1 << 21) -> MutationReport:
    """Evaluate the predicate on ``Y xor {v}`` for every ``v < bd``.

    Evaluation is incremental: the base trace's per-conjunct mismatch sets
    are computed once, each flip toggles exactly one candidate mismatch,
    and a conjunct is evaluated only until the conjunction is decided.
    Conjuncts are visited in the order bounds, extent, start/next (the
    slice receiving the flip), so the reported conjunct is the first false
    one among those that read the flipped position.
    """
    ctx, t = Y.ctx, Y.t
    b0, b = Y.bd0, Y.bd
    if b >= 1 << 52:
        raise ValueError("trace bound too large for the vectorized sweep")
    base = explain_computation(Y.set, t, ctx, strict)
    if not base.ok:
        raise ValueError(f"mutation sweep needs a valid base trace ({base.conjunct})")
    members = np.array([e for e in Y.set if e < b], dtype=np.int64)
    counts = {"bounds": 0, "extent": 0, "start": 0, "next": 0}
    survivors: list[int] = []
    for lo in range(0, b, chunk):
        v = np.arange(lo, min(b, lo + chunk), dtype=np.int64)
        i, w = _np_unpair(v)
        in_y = np.isin(v, members, assume_unique=True)
        adds = ~in_y
        # base mismatch sets are empty, so a flip makes its conjunct false
        # exactly when it toggles a position that conjunct constrains
        q_bounds = (i <= t) & (w >= b0)
        q_extent = (i > t) if strict else np.zeros_like(q_bounds)
        q_target = (i <= t) & (w < b0)
        bad_bounds = q_bounds & adds
        bad_extent = q_extent & adds & ~bad_bounds
        bad_target = q_target
        bad_start = bad_target & (i == 0)
        bad_next = bad_target & (i > 0)
        counts["bounds"] += int(bad_bounds.sum())
        counts["extent"] += int(bad_extent.sum())
        counts["start"] += int(bad_start.sum())
        counts["next"] += int(bad_next.sum())
        rejected = bad_bounds | bad_extent | bad_target
        if not rejected.all():
            survivors.extend(int(x) for x in v[~rejected][:20])
    total = b
    return MutationReport(total, sum(counts.values()), counts, survivors[:20])


def mutation_spot_check(Y: Trace, samples: int = 200, seed: int = 0,
                        strict: bool = True) -> list[tuple[int, str]]:
    """Full re-evaluation on random flips; returns (v, conjunct) pairs."""
    rng = random.Random(seed)
    b = Y.bd
    picks = set(Y.set.below(b).items[: samples // 4])
    while len(picks) < min(samples, b):
        picks.add(rng.randrange(b))
    out = []
    for v in sorted(picks):
        verdict = explain_computation(Y.set.flip(v), Y.t, Y.ctx, strict)
        out.append((v, "accepted" if verdict.ok else verdict.conjunct))
    return out
