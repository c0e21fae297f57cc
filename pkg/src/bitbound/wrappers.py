"""Universal EXP / PSPACE machines built on U.

``M1`` reads ``z = <N, x, t>`` and runs U on ``(N, x, t, t, t)``; it accepts
iff U accepts and the simulated computation ends accepting. ``M2`` is the
same with space ``|t|``. The starred variants read ``<N, x, t, v, s>``
with ``v = <u_v, i_v>`` and accept iff U accepts on ``(N, x, t, s, s)``
(resp. ``(N, x, t, |s|, s)``) and the bit written for cell ``i_v+1`` in
round ``u_v`` is 1.

Each wrapper run is: extraction of the fields (``|z|^2 + 1`` steps), the U
run, and a final check of ``FINAL_STEPS`` steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .encoding import NatSet, bd0, bitlen, tuple_code, unpair, untuple
from .machine import ACCEPT, state_of_set
from .terms import WitnessTerms
from .trace import Trace, WitnessReport, classify, explain_computation
from .universal import UTrace, f_map, g_map, schedule, u_run

FINAL_STEPS = 3
WRAPPER_EXPONENT = 10
KINDS = ("m1", "m1star", "m2", "m2star")
ARITY = {"m1": 3, "m2": 3, "m1star": 5, "m2star": 5}


def extraction_steps(z: int) -> int:
    return bitlen(z) ** 2 + 1


@lru_cache(maxsize=512)
def _u(N: int, x: int, t: int, s: int, q: int, oracles: tuple = ()) -> UTrace:
    return u_run(N, (x,), t, s, q, oracles)


@dataclass(frozen=True)
class WrapperRun:
    kind: str
    z: int
    fields: tuple[int, ...]
    wellformed: bool
    reason: str
    utrace: UTrace | None
    latch: int | None
    verdict: str
    time: int
    space: int
    query: int = 0

    @property
    def accepted(self) -> bool:
        return self.verdict == "accept"

    def summary(self) -> dict:
        out = {"kind": self.kind, "fields": list(self.fields), "wellformed": self.wellformed,
               "verdict": self.verdict, "time": self.time, "space": self.space,
               "reason": self.reason}
        if self.latch is not None:
            out["latch"] = self.latch
        if self.utrace is not None:
            out["u"] = self.utrace.summary()
        return out


def space_bound(kind: str, t: int, s: int) -> int:
    """Space parameter handed to U for the plain (s = t) or starred form."""
    base = t if kind in ("m1", "m2") else s
    return base if kind in ("m1", "m1star") else bitlen(base)


def _finish(kind, z, fields, ok, reason, Z, latch, accept) -> WrapperRun:
    pre = extraction_steps(z)
    if Z is None:
        return WrapperRun(kind, z, fields, ok, reason, None, latch, "reject",
                          pre + FINAL_STEPS, bitlen(z) + 2)
    space = schedule(*Z.y).space() if Z.suitable else bitlen(z) + 2
    return WrapperRun(kind, z, fields, ok, reason, Z, latch,
                      "accept" if accept else "reject",
                      pre + Z.end_time + FINAL_STEPS, max(space, bitlen(z) + 2))


def wrapper_run(kind: str, z: int, oracles: tuple[NatSet, ...] = ()) -> WrapperRun:
    if kind not in KINDS:
        raise ValueError(f"unknown wrapper {kind!r}")
    fields = untuple(z, ARITY[kind])
    N, x, t = fields[:3]
    if kind in ("m1", "m2"):
        s, q = space_bound(kind, t, t), t
        Z = _u(N, x, t, s, q, oracles)
        if not Z.suitable:
            return _finish(kind, z, fields, False, "not a suitable machine code", Z, None, False)
        final = state_of_set(Z.tapes[-1], N, (x,), s, q)
        ok = Z.accepted and final == ACCEPT
        reason = "" if Z.accepted else f"U rejects ({Z.fail_reason})"
        return _finish(kind, z, fields, True, reason, Z, None, ok)
    v, s_field = fields[3], fields[4]
    u_v, i_v = unpair(v)
    s = space_bound(kind, t, s_field)
    q = s_field
    if N <= 0:
        return _finish(kind, z, fields, False, "not a suitable machine code", None, None, False)
    if u_v > t:
        return _finish(kind, z, fields, False, f"u_v = {u_v} > t = {t}", None, None, False)
    limit = bd0(N, (x,), s, q)
    if i_v >= limit:
        return _finish(kind, z, fields, False, f"i_v = {i_v} >= bd0 = {limit}", None, None, False)
    Z = _u(N, x, t, s, q, oracles)
    if not Z.suitable:
        return _finish(kind, z, fields, False, "not a suitable machine code", Z, None, False)
    latch = int(i_v in Z.tapes[u_v])
    return _finish(kind, z, fields, True, "" if Z.accepted else "U rejects", Z, latch,
                   Z.accepted and latch == 1)


def m1_run(z: int, oracles=()) -> WrapperRun:
    return wrapper_run("m1", z, oracles)


def m2_run(z: int, oracles=()) -> WrapperRun:
    return wrapper_run("m2", z, oracles)


def m1star_run(z: int, oracles=()) -> WrapperRun:
    return wrapper_run("m1star", z, oracles)


def m2star_run(z: int, oracles=()) -> WrapperRun:
    return wrapper_run("m2star", z, oracles)


def triple(M: int, x: int, t: int) -> int:
    return tuple_code(M, x, t)


def quintuple(M: int, x: int, t: int, v: int, s: int) -> int:
    return tuple_code(M, x, t, v, s)


# ----------------------------------------------------------- witness terms

def witness_terms(kind: str) -> WitnessTerms:
    """Published witness terms; the starred forms share their base's terms."""
    c = WRAPPER_EXPONENT
    if kind in ("m1", "m1star"):
        return WitnessTerms.exp(f"(x+4)**{c}")
    if kind in ("m2", "m2star"):
        return WitnessTerms.pspace(f"(x+4)**{c} * 2**((len(x)+4)**3)")
    raise ValueError(kind)


def check_wrapper_witness(kind: str, samples: Iterable[int] | None = None) -> WitnessReport:
    """Strict ``time < t0``, ``space < s0``, ``query < |q0|`` per sample."""
    W = witness_terms(kind)
    samples = range(64) if samples is None else samples
    n = 0
    worst = {"time_slack": None, "space_slack": None}
    for z in samples:
        n += 1
        r = wrapper_run(kind, z)
        t0, s0, q0 = W.bounds((z,))
        for name, val, bound in (("time", r.time, t0), ("space", r.space, s0),
                                 ("query", r.query, bitlen(q0))):
            if not val < bound:
                return WitnessReport(False, n, {"inputs": [z], "which": name,
                                                "value": val, "bound": bound}, worst)
        for name, val, bound in (("time", r.time, t0), ("space", r.space, s0)):
            slack = bound - val
            key = f"{name}_slack"
            if worst[key] is None or slack < worst[key]:
                worst[key] = slack
    return WitnessReport(True, n, None, worst)


# ----------------------------------------------------------- trace maps

@dataclass(frozen=True)
class WrapperTrace:
    """A halting wrapper computation: extraction, U run, final check."""

    kind: str
    z: int
    utrace: UTrace
    verdict: str

    @property
    def time(self) -> int:
        return extraction_steps(self.z) + self.utrace.end_time + FINAL_STEPS


def _require_halting(Y: Trace) -> str:
    v = explain_computation(Y.set, Y.t, Y.ctx)
    if not v.ok:
        raise ValueError(f"not a computation: {v.conjunct} at {v.index}")
    cls = classify(Y)
    if cls not in ("accepting", "rejecting"):
        raise ValueError(f"computation is {cls}")
    return cls


def f_wrap(kind: str, Y: Trace) -> WrapperTrace:
    """Wrapper computation on ``<M, x, t>`` built from M's computation ``Y``."""
    if kind not in ("m1", "m2"):
        raise ValueError("trace maps are defined for m1 and m2")
    cls = _require_halting(Y)
    M, (x,), t = Y.ctx.M, Y.ctx.inputs, Y.t
    if (Y.ctx.s, Y.ctx.q) != (space_bound(kind, t, t), t):
        raise ValueError("computation bounds do not match the wrapper's")
    Z = f_map(Y)
    return WrapperTrace(kind, triple(M, x, t), Z, "accept" if cls == "accepting" else "reject")


def g_wrap(W: WrapperTrace) -> Trace:
    Y = g_map(W.utrace)
    cls = classify(Y)
    expect = "accept" if cls == "accepting" else "reject"
    if cls not in ("accepting", "rejecting") or expect != W.verdict:
        raise ValueError("wrapper verdict does not match the simulated computation")
    return Y


def f1_map(Y: Trace) -> WrapperTrace:
    return f_wrap("m1", Y)


def g1_map(W: WrapperTrace) -> Trace:
    return g_wrap(W)


def f2_map(Y: Trace) -> WrapperTrace:
    return f_wrap("m2", Y)


def g2_map(W: WrapperTrace) -> Trace:
    return g_wrap(W)


def wrapper_trace(kind: str, z: int) -> WrapperTrace:
    """The computation of an m1/m2 wrapper as a :class:`WrapperTrace`."""
    r = wrapper_run(kind, z)
    if r.utrace is None or not r.utrace.suitable:
        raise ValueError("input is rejected before U runs")
    return WrapperTrace(kind, z, r.utrace, r.verdict)


def star_bits(kind: str, M: int, x: int, t: int, s: int) -> NatSet:
    """``{v < bd | the starred wrapper accepts <M, x, t, v, s>}`` by sweeping v."""
    from .encoding import bd as bd_of
    sp = space_bound(kind, t, s)
    bound = bd_of(M, (x,), t, sp, s)
    return NatSet(v for v in range(bound)
                  if wrapper_run(kind, quintuple(M, x, t, v, s)).accepted)


def fstar_map(kind: str, Y: Trace, v: int) -> WrapperRun:
    """Starred-wrapper computation deciding ``v in Y``."""
    ctx = Y.ctx
    return wrapper_run(kind, quintuple(ctx.M, ctx.inputs[0], Y.t, v, ctx.q), ctx.oracles)


def gstar_map(kind: str, M: int, x: int, t: int, s: int) -> Trace:
    """Reassemble M's computation from the starred wrapper's verdicts."""
    from .trace import context
    sp = space_bound(kind, t, s)
    return Trace(star_bits(kind, M, x, t, s), t, context(M, (x,), sp, s))
