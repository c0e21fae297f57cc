"""The acceptance matrix: nine property checks at desk scale.

Each ``criterion_*`` function returns a detail dict; ``run_criteria``
executes a selection and ``main`` prints one line per criterion.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .circuit import (CircuitError, decode, eval as eval_single, eval_many, eval_tuple,
                      code_length, random_circuit, restrict, size_bound_bits)
from .encoding import NatSet, bd, pair, unpair
from .fixtures import LOOP, ORACLE, PARITY, COPY, all_fixtures
from .terms import WitnessTerms
from .trace import Fail, check_witness, classify, is_partial_computation, mutation_spot_check, \
    mutation_sweep, run
from .universal import (RESOURCE_EXPONENT, SweepAudit, UTraceError, f_map, g_map, resource_bound,
                        schedule, timing_errors, u_run)
from .witness import check, corrupt, corruption_point, exp_view, pipeline
from .wrappers import (KINDS, check_wrapper_witness, m1_run, m2_run, quintuple, space_bound,
                       star_bits, triple)

__all__ = ["CriterionResult", "CRITERIA", "run_criterion", "run_criteria", "main"]


@dataclass
class CriterionResult:
    id: int
    name: str
    ok: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        mark = "PASS" if self.ok else "FAIL"
        return f"[{mark}] criterion {self.id}: {self.name} ({self.seconds:.1f}s)"


def _first(failures: list, limit: int = 5) -> list:
    return failures[:limit]


# ------------------------------------------------------------------ 1

def criterion_1(seed: int = 0) -> dict:
    """Pairing round-trips and slice/reassemble identity."""
    rng = random.Random(seed)
    bad = []
    for _ in range(100_000):
        x = rng.getrandbits(rng.choice((8, 32, 64, 200)))
        y = rng.getrandbits(rng.choice((8, 32, 64, 200)))
        z = pair(x, y)
        if unpair(z) != (x, y) or pair(*unpair(z)) != z:
            bad.append(("random", x, y))
    xs = np.arange(256, dtype=np.int64)
    grid = 0
    for x in range(256):
        for y in range(256):
            grid += 1
            if unpair(pair(x, y)) != (x, y):
                bad.append(("grid", x, y))
    # pairing is onto: the grid's codes are exactly the triangle they span
    codes = {pair(int(x), int(y)) for x in xs for y in xs if x + y < 256}
    if codes != set(range(256 * 257 // 2)):
        bad.append(("onto", 256))
    sets = 0
    for _ in range(1000):
        size = rng.randrange(0, 40)
        Y = NatSet(pair(rng.randrange(12), rng.getrandbits(rng.choice((4, 16, 40))))
                   for _ in range(size))
        sets += 1
        if NatSet.assemble(Y.slices()) != Y:
            bad.append(("slices", list(Y)))
        if any(Y.slice(i) != NatSet(Y.slices().get(i, ())) for i in range(13)):
            bad.append(("slice", list(Y)))
    return {"ok": not bad, "pairs": 100_000 + grid, "sets": sets, "failures": _first(bad),
            "properties": ["encoding.pair-roundtrip", "encoding.slice-assemble"]}


# ------------------------------------------------------------------ 2

def criterion_2(inputs: int = 32, spot: int = 4) -> dict:
    """Simulator traces are computations and every single flip below bd breaks them."""
    machines = [PARITY(), COPY(), LOOP(2), ORACLE()]
    bad, traces, flips, fails = [], 0, 0, 0
    for fx in machines:
        for x in range(inputs):
            t, s, q = fx.witness.bounds((x,))
            Y = run(fx.code, (x,), t, s, q, fx.oracles)
            if isinstance(Y, Fail):
                fails += 1
                continue
            traces += 1
            if not is_partial_computation(Y):
                bad.append({"fixture": fx.name, "x": x, "why": "trace rejected"})
                continue
            rep = mutation_sweep(Y)
            flips += rep.total
            if not rep.ok:
                bad.append({"fixture": fx.name, "x": x, "survivors": rep.survivors[:5]})
            # the incremental sweep is cross-checked by full re-evaluation
            for v, verdict in mutation_spot_check(Y, samples=spot, seed=x):
                if verdict == "accepted":
                    bad.append({"fixture": fx.name, "x": x, "v": v, "why": "spot check"})
    return {"ok": not bad, "traces": traces, "failed_runs": fails, "flips": flips,
            "failures": _first(bad),
            "properties": ["trace.simulator-sound", "trace.flip-rejected"]}


# ------------------------------------------------------------------ 3 and 4

def timing_grid() -> list[tuple[str, int, int, int, int, str]]:
    """Cells ``(fixture, x, t, s, q, detail)``; 72 sweep-level plus round-level cells."""
    cells = []
    for name in ("PARITY", "LOOP_2"):
        for x in (0, 1, 2):
            for t in (0, 1, 2):
                for s in (1, 2):
                    for q in (0, 1):
                        cells.append((name, x, t, s, q, "sweeps"))
    for fx in all_fixtures():
        for x in (0, 5, 13):
            t, s, q = exp_view(fx.witness).bounds((x,))
            cells.append((fx.name, x, t, s, q, "rounds"))
            cells.append((fx.name, x, max(1, t // 2), max(1, s // 2), q, "rounds"))
    return cells


def _fixtures_by_name() -> dict:
    return {fx.name: fx for fx in all_fixtures()}


def criterion_3() -> dict:
    """U's phase boundaries and total time match the closed-form schedule exactly."""
    fixtures = _fixtures_by_name()
    bad, audited_cells = [], 0
    cells = timing_grid()
    for name, x, t, s, q, detail in cells:
        fx = fixtures[name]
        sch = schedule(fx.code, (x,), t, s, q)
        audit = SweepAudit(sch)
        Z = u_run(fx.code, (x,), t, s, q, fx.oracles, detail=detail,
                  sink=audit if detail == "sweeps" else None)
        errs = timing_errors(Z)
        if Z.end_time != sch.t5:
            errs.append("end time")
        if detail == "sweeps":
            audited_cells += audit.cells
            if not audit.ok:
                errs.append(f"sweep times differ at {audit.mismatches[:3]}")
        if errs:
            bad.append({"cell": [name, x, t, s, q], "errors": errs})
    return {"ok": not bad and len(cells) >= 50, "cells": len(cells),
            "sweep_cells": audited_cells, "failures": _first(bad),
            "properties": ["universal.phase-times", "universal.total-time"]}


def criterion_4() -> dict:
    """F/G round-trips between M and U computations, and U's resource bounds."""
    fixtures = _fixtures_by_name()
    c = RESOURCE_EXPONENT
    bad, trips = [], 0
    for name, x, t, s, q, _ in timing_grid():
        fx = fixtures[name]
        cell = [name, x, t, s, q]
        Y = run(fx.code, (x,), t, s, q, fx.oracles)
        if not isinstance(Y, Fail):
            trips += 1
            back = g_map(f_map(Y))
            if back.set.below(Y.bd) != Y.set.below(Y.bd):
                bad.append({"cell": cell, "why": "g(f(Y)) != Y"})
        Z = u_run(fx.code, (x,), t, s, q, fx.oracles)
        if Z.accepted:
            trips += 1
            try:
                if f_map(g_map(Z)) != Z:
                    bad.append({"cell": cell, "why": "f(g(Z)) != Z"})
            except UTraceError as exc:
                bad.append({"cell": cell, "why": str(exc)})
        sch = schedule(fx.code, (x,), t, s, q)
        n = sch.n
        if sch.t5 > resource_bound(t, s, n, c):
            bad.append({"cell": cell, "why": "time bound", "t5": sch.t5})
        if sch.space() > (s + n) ** c:
            bad.append({"cell": cell, "why": "space bound", "space": sch.space()})
    return {"ok": not bad, "round_trips": trips, "exponent": c, "failures": _first(bad),
            "properties": ["universal.f-g-roundtrip", "universal.resource-bounds"]}


# ------------------------------------------------------------------ 5

def criterion_5(inputs: int = 32) -> dict:
    """M1/M2 verdicts equal direct classification; U never raises its fail flag."""
    bad, runs = [], 0
    for fx in all_fixtures():
        views = [("m1", exp_view(fx.witness))]
        if fx.witness.kind == "pspace" or "pspace" in fx.tags:
            views.append(("m2", WitnessTerms.pspace(str((fx.witness.t_m or fx.witness.t0_term)))))
        for kind, W in views:
            wrapper = m1_run if kind == "m1" else m2_run
            for x in range(inputs):
                tm = W.t_M((x,))
                s = space_bound(kind, tm, tm)
                Y = run(fx.code, (x,), tm, s, tm, fx.oracles)
                expect = classify(Y) == "accepting"
                r = wrapper(triple(fx.code, x, tm), fx.oracles)
                runs += 1
                flags = r.utrace.flags if r.utrace is not None else ()
                if r.accepted != expect:
                    bad.append({"fixture": fx.name, "wrapper": kind, "x": x,
                                "direct": classify(Y), "wrapper_verdict": r.verdict})
                if any(flags):
                    bad.append({"fixture": fx.name, "wrapper": kind, "x": x, "why": "fail flag"})
    return {"ok": not bad, "runs": runs, "failures": _first(bad),
            "properties": ["wrappers.universality", "wrappers.never-fail"]}


# ------------------------------------------------------------------ 6

STAR_CELLS = (("LOOP_2", 0, 1, 1), ("LOOP_2", 1, 2, 1), ("PARITY", 0, 1, 1),
              ("PARITY", 1, 2, 1))


def criterion_6() -> dict:
    """The starred wrapper's verdicts over all ``v < bd`` rebuild the trace."""
    fixtures = _fixtures_by_name()
    bad, points = [], 0
    for name, x, t, s in STAR_CELLS:
        fx = fixtures[name]
        sp = space_bound("m1star", t, s)
        bound = bd(fx.code, (x,), t, sp, s)
        points += bound
        Y = run(fx.code, (x,), t, sp, s, fx.oracles)
        got = star_bits("m1star", fx.code, x, t, s)
        want = NatSet() if isinstance(Y, Fail) else Y.set.below(bound)
        if got != want:
            diff = sorted(set(got) ^ set(want))
            bad.append({"cell": [name, x, t, s], "bd": bound, "diff": diff[:5]})
    return {"ok": not bad, "cells": len(STAR_CELLS), "points": points, "failures": _first(bad),
            "properties": ["wrappers.bit-oracle"]}


# ------------------------------------------------------------------ 7

def criterion_7(lengths: tuple[int, ...] = (2, 3)) -> dict:
    """Synthesize, transform and check witnesses; corrupted witnesses are rejected."""
    bad, cells, corrupted = [], [], 0
    for fx in all_fixtures():
        for n in lengths:
            res = pipeline(fx.code, exp_view(fx.witness), n, fx.oracles)
            cells.append({"fixture": fx.name, "n": n, "ok": res.ok, "checks": len(res.checks)})
            for name, r in sorted(res.checks.items()):
                if not r.ok:
                    bad.append({"fixture": fx.name, "n": n, "claim": name,
                                "counterexample": r.counterexample})
            for name in ("mu", "alpha", "beta", "mu_from_beta"):
                claim = res.claims[name]
                broken = corrupt(claim, corruption_point(claim, seed=n))
                corrupted += 1
                if check(broken).ok:
                    bad.append({"fixture": fx.name, "n": n, "claim": name,
                                "why": "corruption not caught"})
    return {"ok": not bad, "cells": cells, "corruptions": corrupted, "failures": _first(bad),
            "properties": ["witness.cycle-closes", "witness.corruption-caught"]}


# ------------------------------------------------------------------ 8

def criterion_8(seed: int = 0, adversarial: int = 10_000, circuits: int = 1000) -> dict:
    """Code-size bound, totality of evaluation, and restriction laws."""
    rng = random.Random(seed)
    bad = []
    pool = []
    for _ in range(circuits):
        layout = tuple(rng.randrange(0, 5) for _ in range(rng.randrange(1, 4)))
        pool.append(random_circuit(rng, layout, rng.randrange(1, 40)))
    encodable = 0
    for c in pool:
        try:
            code = c.code()
        except CircuitError:
            continue
        encodable += 1
        if not code < 1 << size_bound_bits(c.size):
            bad.append({"law": "size bound", "size": c.size})
        if code.bit_length() != code_length(c):
            bad.append({"law": "code length", "size": c.size})
    for _ in range(adversarial):
        c = rng.choice(pool)
        kind = rng.randrange(4)
        if kind == 0:
            x = (1 << c.width) + rng.getrandbits(rng.randrange(1, 70))
            if eval_single(c, x) != 0:
                bad.append({"law": "out of range input", "x": x})
        elif kind == 1:
            garbage = rng.getrandbits(rng.randrange(1, 200))
            if decode(garbage) is None and eval_single(garbage, rng.getrandbits(8)) != 0:
                bad.append({"law": "non-code", "code": garbage})
        elif kind == 2:
            x = -rng.randrange(1, 1 << 20)
            if eval_single(c, x) != 0:
                bad.append({"law": "negative input", "x": x})
        else:
            xs = [rng.getrandbits(w + 1) for w in c.layout] + [0] * rng.randrange(2)
            fits = len(xs) == len(c.layout) and all(v < 1 << w for v, w in zip(xs, c.layout))
            if not fits and eval_tuple(c, xs) != 0:
                bad.append({"law": "malformed tuple", "xs": xs})
    restricted = 0
    for c in pool:
        if not c.layout:
            continue
        x0 = rng.getrandbits(c.layout[0]) if c.layout[0] else 0
        r = restrict(c, [x0])
        restricted += 1
        rest = [tuple(rng.getrandbits(w) if w else 0 for w in c.layout[1:]) for _ in range(16)]
        full = eval_many(c, [(x0,) + p for p in rest])
        part = eval_many(r, rest)
        if not np.array_equal(full, part):
            bad.append({"law": "restrict pointwise", "x": x0})
        try:
            if r.code() > c.code():
                bad.append({"law": "restrict code grows", "x": x0})
        except CircuitError:
            pass
    return {"ok": not bad, "circuits": len(pool), "encodable": encodable,
            "adversarial": adversarial, "restricted": restricted, "failures": _first(bad),
            "properties": ["circuit.size-bound", "circuit.eval-total", "circuit.restrict"]}


# ------------------------------------------------------------------ 9

def _wrapper_samples(kind: str, seed: int = 0) -> list[int]:
    rng = random.Random(seed)
    out = list(range(64))
    for fx in (PARITY(), LOOP(2)):
        for x in range(4):
            tm = fx.witness.t_M((x,))
            if kind in ("m1", "m2"):
                out.append(triple(fx.code, x, tm))
            else:
                sp = space_bound(kind, tm, tm)
                v = rng.randrange(bd(fx.code, (x,), tm, sp, tm))
                out.append(quintuple(fx.code, x, tm, v, tm))
    return out


def criterion_9(inputs: int = 64) -> dict:
    """Strict witness inequalities for the wrappers and every fixture."""
    bad, checked = [], 0
    for kind in KINDS:
        rep = check_wrapper_witness(kind, _wrapper_samples(kind))
        checked += rep.checked
        if not rep.ok:
            bad.append({"wrapper": kind, "violation": rep.violation})
    for fx in all_fixtures():
        rep = check_witness(fx.code, fx.witness, [(x,) for x in range(inputs)], fx.oracles)
        checked += rep.checked
        if not rep.ok:
            bad.append({"fixture": fx.name, "violation": rep.violation})
    return {"ok": not bad, "checked": checked, "failures": _first(bad),
            "properties": ["wrappers.witness", "fixtures.witness"]}


CRITERIA: dict[int, tuple[str, Callable[[], dict]]] = {
    1: ("encoding laws", criterion_1),
    2: ("step semantics and mutation sweep", criterion_2),
    3: ("exact universal-machine timing", criterion_3),
    4: ("F/G round-trips and resource bounds", criterion_4),
    5: ("universality of the wrappers", criterion_5),
    6: ("bit-oracle reconstruction", criterion_6),
    7: ("witness pipeline soundness", criterion_7),
    8: ("circuit compliance", criterion_8),
    9: ("witness-term validation", criterion_9),
}


def run_criterion(cid: int) -> CriterionResult:
    name, fn = CRITERIA[cid]
    start = time.perf_counter()
    detail = fn()
    return CriterionResult(cid, name, bool(detail.pop("ok")), detail,
                           time.perf_counter() - start)


def run_criteria(ids=None, echo: Callable[[str], None] | None = None) -> list[CriterionResult]:
    out = []
    for cid in sorted(ids or CRITERIA):
        res = run_criterion(cid)
        if echo is not None:
            echo(res.line())
        out.append(res)
    return out


def main(argv=None) -> int:
    import sys
    ids = [int(a) for a in (argv if argv is not None else sys.argv[1:])]
    results = run_criteria(ids or None, echo=print)
    return 0 if all(r.ok for r in results) else 1


if __name__ == "__main__":
    raise SystemExit(main())
