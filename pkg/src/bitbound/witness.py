"""Circuit witnesses for explicit machines, their checkers and transforms.

Three claim shapes are checked exhaustively over inputs of one length n:

``mu``    a circuit ``C(x, v)`` whose restriction to each ``x`` has the
          halting computation of M on x as its truth table;
``alpha`` a circuit ``C(x)`` deciding acceptance;
``beta``  a circuit ``D(x, t, v)`` deciding membership in the partial
          time-t computation, uniformly for every ``t <= t_M(x)``.

The universal wrappers take packed codes hundreds of bits long, so claims
about them (:class:`DomainClaim`) are checked on their domain of packed
codes ``<M, x, t_M(x)>`` / ``<M, x, t, v, t_M(x)>`` rather than on every
string of that length.

Transforms between claims build real circuits. Where a transform packs
fields into a code that the source circuit immediately unpacks, the pair
cancels and the fields are wired straight through; each such shortcut is
cross-checked against the source circuit evaluated on the packed code.
"""

from __future__ import annotations

import math
import os
import random
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

from . import arith
from .circuit import (Builder, Circuit, eval_many, flip_point, restrict,
                      truth_table)
from .encoding import NatSet, bd as bd_of, bitlen, pair, tuple_code, unpair
from .machine import start_config
from .synth import (StepFamily, accept_wire, compile_computation, length_classes,
                    representative)
from .terms import WitnessTerms
from .trace import Fail, _next_set, classify, context, explain_computation, run
from .wrappers import m1_run, m1star_run

__all__ = [
    "WitnessClaim", "DomainClaim", "CheckResult", "SynthesisError", "exp_view",
    "achieved_exponent", "mu_check", "alpha_check", "beta_check", "iomu_check",
    "domain_check", "mu_synthesize", "alpha_from_mu", "alpha_for_m1", "alpha_for_m1star",
    "mu_for_m1", "beta_from_alpha", "mu_from_beta", "alpha_transfer", "mu_transfer",
    "corrupt", "corruption_point", "pipeline",
]

CLAIM_KINDS = ("mu", "alpha", "beta")
MAX_TABLEAU_CELLS = 200_000


class SynthesisError(ValueError):
    pass


def achieved_exponent(code: int, n: int) -> int:
    """Smallest ``c >= 1`` with ``code < 2^(n^c)``."""
    if n < 2:
        raise ValueError("lengths start at 2")
    need = max(1, bitlen(code))
    c = max(1, math.ceil(math.log(need, n)))
    while n ** c < need:
        c += 1
    while c > 1 and n ** (c - 1) >= need:
        c -= 1
    return c


def exp_view(terms: WitnessTerms) -> WitnessTerms:
    """Single-term form with bounds ``(t_M, t_M, t_M)`` dominating ``terms``."""
    if terms.kind == "exp":
        return terms
    if terms.kind == "general":
        return WitnessTerms.exp(f"max({terms.t0_term}, {terms.s0_term}, {terms.q0_term})")
    return WitnessTerms.exp(str(terms.t_m))


@dataclass(frozen=True)
class WitnessClaim:
    kind: str
    M: int
    terms: WitnessTerms
    n: int
    circuit: Circuit
    oracles: tuple[NatSet, ...] = ()
    c: int | None = None
    notes: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in CLAIM_KINDS:
            raise ValueError(f"unknown claim kind {self.kind!r}")
        if self.n < 2:
            raise ValueError("claims are about lengths n > 1")

    def bounds(self, x: int) -> tuple[int, int, int]:
        return self.terms.bounds((x,))

    @property
    def exponent(self) -> int:
        return self.c if self.c is not None else achieved_exponent(self.circuit.code(), self.n)

    def size_ok(self) -> bool:
        return bitlen(self.circuit.code()) <= self.n ** self.exponent

    def report(self) -> dict:
        code = self.circuit.code()
        return {"kind": self.kind, "n": self.n, "size": self.circuit.size,
                "code_bits": bitlen(code), "exponent": self.exponent,
                "achieved_exponent": achieved_exponent(code, self.n)}

    def with_circuit(self, circuit: Circuit, **notes) -> "WitnessClaim":
        return replace(self, circuit=circuit, c=None, notes={**self.notes, **notes})


@dataclass
class CheckResult:
    ok: bool
    kind: str
    size_ok: bool
    semantic_ok: bool
    checked: int
    counterexample: dict | None = None
    report: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok

    def summary(self) -> dict:
        return {"ok": self.ok, "kind": self.kind, "size_ok": self.size_ok,
                "semantic_ok": self.semantic_ok, "checked": self.checked,
                "counterexample": self.counterexample, "report": self.report,
                "warnings": self.warnings}


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("BITBOUND_WORKERS", "1")))
    except ValueError:
        return 1


def _pmap(fn: Callable, items: Sequence) -> list:
    """Order-preserving map over inputs, in a process pool if configured."""
    workers = _workers()
    if workers == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _finish(kind: str, claim, fails: list, checked: int) -> CheckResult:
    size_ok = claim.size_ok()
    bad = next((f for f in fails if f is not None), None)
    return CheckResult(size_ok and bad is None, kind, size_ok, bad is None, checked, bad,
                       claim.report())


def _layout_error(claim, shape: Sequence[int | None]) -> CheckResult | None:
    layout = claim.circuit.layout
    if len(layout) != len(shape) or any(s is not None and s != w for s, w in zip(shape, layout)):
        return CheckResult(False, claim.kind, claim.size_ok(), False, 0,
                           {"reason": f"input blocks {list(layout)} do not fit the claim"},
                           claim.report())
    return None


# ------------------------------------------------------------- checkers

def _mu_one(args) -> dict | None:
    claim, x = args
    t, s, q = claim.bounds(x)
    ctx = context(claim.M, (x,), s, q, claim.oracles)
    Y = truth_table(restrict(claim.circuit, [x]), limit=None)
    verdict = explain_computation(Y, t, ctx)
    if not verdict.ok:
        return {"x": x, "conjunct": verdict.conjunct, "index": verdict.index,
                "detail": verdict.detail}
    from .trace import Trace
    cls = classify(Trace(Y, t, ctx))
    if cls not in ("accepting", "rejecting"):
        return {"x": x, "conjunct": "halting", "detail": cls}
    return None


def mu_check(claim: WitnessClaim) -> CheckResult:
    """Each ``C_x`` is a halting computation of M on x (all ``x < 2^n``)."""
    bad = _layout_error(claim, (claim.n, None))
    if bad:
        return bad
    xs = range(1 << claim.n)
    return _finish("mu", claim, _pmap(_mu_one, [(claim, x) for x in xs]), len(xs))


def alpha_check(claim: WitnessClaim) -> CheckResult:
    """``C(x) = 1`` iff the computation on x accepts (all ``x < 2^n``)."""
    bad = _layout_error(claim, (claim.n,))
    if bad:
        return bad
    xs = list(range(1 << claim.n))
    got = eval_many(claim.circuit, [(x,) for x in xs])
    fails = []
    for x, g in zip(xs, got):
        t, s, q = claim.bounds(x)
        Y = run(claim.M, (x,), t, s, q, claim.oracles)
        accepts = not isinstance(Y, Fail) and classify(Y) == "accepting"
        if bool(g) != accepts:
            fails.append({"x": x, "circuit": int(g), "accepts": accepts})
            break
    return _finish("alpha", claim, fails, len(xs))


def _beta_one(args) -> dict | None:
    claim, x, times = args
    t_max, s, q = claim.bounds(x)
    for t in times:
        Y = run(claim.M, (x,), t, s, q, claim.oracles)
        if isinstance(Y, Fail):
            return {"x": x, "t": t, "reason": f"reference run fails: {Y.reason}"}
        bound = bd_of(claim.M, (x,), t, s, q)
        got = truth_table(restrict(claim.circuit, [x, t]), limit=None)
        diff = [v for v in set(got).symmetric_difference(Y.set) if v < bound]
        if diff:
            v = min(diff)
            return {"x": x, "t": t, "v": v, "circuit": int(v in got), "trace": int(v in Y.set)}
    return None


def beta_check(claim: WitnessClaim, times: Callable[[int, int], Iterable[int]] | None = None
               ) -> CheckResult:
    """``D(x, t, v) = [v in Y_t]`` for ``v < bd`` and every ``t <= t_M(x)``.

    Values ``v >= bd`` are don't-care. ``times(x, t_M)`` can narrow the
    times checked (the default is all of them, in increasing order).
    """
    bad = _layout_error(claim, (claim.n, None, None))
    if bad:
        return bad
    jobs = []
    for x in range(1 << claim.n):
        t_max = claim.bounds(x)[0]
        if t_max >> claim.circuit.layout[1]:
            return CheckResult(False, "beta", claim.size_ok(), False, 0,
                               {"x": x, "reason": f"t block cannot hold t_M = {t_max}"},
                               claim.report())
        ts = range(t_max + 1) if times is None else sorted(times(x, t_max))
        jobs.append((claim, x, list(ts)))
    fails = _pmap(_beta_one, jobs)
    return _finish("beta", claim, fails, sum(len(j[2]) for j in jobs))


def iomu_check(pairs: Sequence[WitnessClaim]) -> CheckResult:
    """Per-length check of a list of mu claims for one machine.

    Only the listed lengths are checked: "infinitely many lengths" cannot be
    tested, so the verdict is the conjunction over the list.
    """
    notes = []
    if not pairs:
        msg = "no lengths given; the conjunction is vacuously true"
        warnings.warn(msg)
        return CheckResult(True, "iomu", True, True, 0, None, {}, [msg])
    M = pairs[0].M
    per_length = {}
    for claim in pairs:
        if claim.M != M:
            raise ValueError("all claims must be about the same machine")
        res = mu_check(claim)
        per_length[claim.n] = res.report
        if not res.ok:
            cex = dict(res.counterexample or {}, n=claim.n, size_ok=res.size_ok)
            return CheckResult(False, "iomu", res.size_ok, res.semantic_ok,
                               len(per_length), cex, {"lengths": per_length}, notes)
    return CheckResult(True, "iomu", True, True, len(pairs), None, {"lengths": per_length}, notes)


# ------------------------------------------------------------ synthesis

def _family(M: int, terms: WitnessTerms, n: int, oracles) -> StepFamily:
    """Step family whose per-length bounds are those of ``terms``."""
    for x in range(1 << n):
        if terms.bounds((x,)) != terms.bounds((representative(bitlen(x)),)):
            raise SynthesisError("bounds must depend only on the input length")
    return StepFamily(M, n, lambda l: terms.bounds((representative(l),)), tuple(oracles))


def mu_synthesize(M: int, terms: WitnessTerms | str, n: int, oracles: Sequence[NatSet] = (),
                  max_cells: int = MAX_TABLEAU_CELLS) -> WitnessClaim:
    """Unroll M into a circuit describing its computation on every x < 2^n."""
    if isinstance(terms, str):
        terms = WitnessTerms.exp(terms)
    fam = _family(M, terms, n, oracles)
    cells = sum((c.t + 1) * c.m() * fam.spec.tapes for c in fam.classes)
    if cells > max_cells:
        raise SynthesisError(f"tableau needs {cells} cells, limit is {max_cells}")
    C = compile_computation(fam)
    return WitnessClaim("mu", M, terms, n, C, tuple(oracles), None, {"tableau_cells": cells})


def _mu_bit(bl: Builder, mu: WitnessClaim, x: Sequence[int], v: Sequence[int]) -> int:
    """``C_mu(x, v)`` inlined; positions wider than its v block are outside Y."""
    V = mu.circuit.layout[1]
    low = arith.fit(bl, v, V)
    hit = bl.import_circuit(mu.circuit, [list(x), low])
    return bl.AND(bl.NOT(bl.OR_all(v[V:])), hit)


def alpha_from_mu(mu: WitnessClaim) -> WitnessClaim:
    """Acceptance read off the final configuration described by ``mu``."""
    fam = _family(mu.M, mu.terms, mu.n, mu.oracles)
    bl = Builder()
    x = bl.inputs(mu.n)
    cls_w = arith.length_onehot(bl, x)
    out = accept_wire(bl, fam, cls_w,
                      lambda cls, p: _mu_bit(bl, mu, x, arith.const_bits(bl, p)))
    return WitnessClaim("alpha", mu.M, mu.terms, mu.n, bl.build(out), mu.oracles,
                        notes={"source": mu.report()})


# ---------------------------------------------------- wrapper-level claims

@dataclass(frozen=True)
class DomainClaim:
    """A circuit about a universal wrapper on packed codes of width ``m``.

    ``kind`` is ``alpha`` (``C(z)`` decides the wrapper) or ``mu``
    (``C(z, w) = [w in S(z)]`` for the snapshot set of the wrapper run).
    The domain is fixed by the target machine, its terms and the length n.
    """

    wrapper: str
    kind: str
    M: int
    terms: WitnessTerms
    n: int
    m: int
    circuit: Circuit
    source: WitnessClaim
    oracles: tuple[NatSet, ...] = ()

    @property
    def exponent(self) -> int:
        return achieved_exponent(self.circuit.code(), self.m)

    def size_ok(self) -> bool:
        return bitlen(self.circuit.code()) <= self.m ** self.exponent

    def report(self) -> dict:
        return {"wrapper": self.wrapper, "kind": self.kind, "m": self.m, "n": self.n,
                "size": self.circuit.size, "code_bits": bitlen(self.circuit.code()),
                "exponent": self.exponent,
                "length_exponent": round(math.log(self.m, self.n), 3)}


def _class_select(bl: Builder, cls_w: Sequence[int], values: dict[int, int], width: int) -> list[int]:
    """Per-class constant as wires: ``OR_l [class l] & value_l``."""
    return [bl.OR_all(bl.AND(cls_w[l], bl.const((v >> k) & 1)) for l, v in values.items())
            for k in range(width)]


def _class_equals(bl: Builder, cls_w: Sequence[int], values: dict[int, int], a: Sequence[int]) -> int:
    return bl.OR_all(bl.AND(cls_w[l], arith.eq_const(bl, a, v)) for l, v in values.items())


def _class_t(claim) -> dict[int, int]:
    return {c.length: c.t for c in length_classes(claim.n, lambda l: claim.terms.bounds(
        (representative(l),)))}


def _split_x(bl: Builder, x: Sequence[int], n: int) -> tuple[list[int], int]:
    """Low n bits of an x field and the wire ``[x < 2^n]``."""
    return arith.fit(bl, x, n), bl.NOT(bl.OR_all(x[n:]))


def _m1star_core(bl, mu: WitnessClaim, N, x, t, v, s_eq) -> int:
    """Wrapper M1* on fields (N, x, t, v, s) inside the domain."""
    xl, fits = _split_x(bl, x, mu.n)
    cls_w = arith.length_onehot(bl, xl)
    u_v, _ = arith.unpair(bl, v)
    return bl.AND_all([arith.eq_const(bl, N, mu.M), fits, s_eq(cls_w),
                       arith.le(bl, u_v, t), _mu_bit(bl, mu, xl, v)])


def _m1star_width(mu: WitnessClaim) -> int:
    width = 0
    for l, t in _class_t(mu).items():
        x = (1 << l) - 1
        _, s, q = mu.bounds(representative(l))
        width = max(width, bitlen(tuple_code(mu.M, x, t, bd_of(mu.M, (x,), t, s, q) - 1, t)))
    return width


def alpha_for_m1star(mu: WitnessClaim) -> DomainClaim:
    """Circuit deciding ``M1*`` on ``<M, x, t, v, t_M(x)>`` for ``x < 2^n``.

    Built from a verified mu claim: unpack the five fields, check the
    domain conditions and ask the mu circuit for bit v.
    """
    m = _m1star_width(mu)
    tvals = _class_t(mu)
    bl = Builder()
    z = bl.inputs(m)
    N, x, t, v, s = arith.tuple_unpack(bl, z, 5)
    out = _m1star_core(bl, mu, N, x, t, v, lambda cls_w: _class_equals(bl, cls_w, tvals, s))
    return DomainClaim("m1star", "alpha", mu.M, mu.terms, mu.n, m, bl.build(out), mu, mu.oracles)


def _m1_width(claim: WitnessClaim) -> int:
    return max(bitlen(tuple_code(claim.M, (1 << l) - 1, t)) for l, t in _class_t(claim).items())


def _m1_alpha_core(bl, alpha: WitnessClaim, N, x, t_eq) -> int:
    xl, fits = _split_x(bl, x, alpha.n)
    cls_w = arith.length_onehot(bl, xl)
    return bl.AND_all([arith.eq_const(bl, N, alpha.M), fits, t_eq(cls_w),
                       bl.import_circuit(alpha.circuit, [xl])])


def alpha_for_m1(alpha: WitnessClaim) -> DomainClaim:
    """Circuit deciding ``M1`` on ``<M, x, t_M(x)>`` from an alpha claim for M."""
    m = _m1_width(alpha)
    tvals = _class_t(alpha)
    bl = Builder()
    z = bl.inputs(m)
    N, x, t = arith.tuple_unpack(bl, z, 3)
    out = _m1_alpha_core(bl, alpha, N, x, lambda cls_w: _class_equals(bl, cls_w, tvals, t))
    return DomainClaim("m1", "alpha", alpha.M, alpha.terms, alpha.n, m, bl.build(out), alpha,
                       alpha.oracles)


def snapshot_set(Z) -> NatSet:
    """``{<u, i+1> : cell i+1 of the round-u configuration holds 1}``."""
    return NatSet(pair(u, i + 1) for u, tape in enumerate(Z.tapes) for i in tape)


def _m1_mu_core(bl, mu: WitnessClaim, N, x, t_eq, w) -> int:
    xl, fits = _split_x(bl, x, mu.n)
    cls_w = arith.length_onehot(bl, xl)
    u, i = arith.unpair(bl, w)
    i_minus, borrow = arith.sub(bl, i, [bl.const(1)])
    v = arith.pair(bl, u, i_minus)
    return bl.AND_all([arith.eq_const(bl, N, mu.M), fits, t_eq(cls_w), bl.NOT(borrow),
                       _mu_bit(bl, mu, xl, v)])


def mu_for_m1(mu: WitnessClaim) -> DomainClaim:
    """Circuit describing M1's run on ``<M, x, t_M(x)>`` as a snapshot set."""
    m = _m1_width(mu)
    tvals = _class_t(mu)
    width = mu.circuit.layout[1] + 1  # pair(u, i+1) < 2 * pair(u, i) + 2
    bl = Builder()
    z = bl.inputs(m)
    w = bl.inputs(width)
    N, x, t = arith.tuple_unpack(bl, z, 3)
    out = _m1_mu_core(bl, mu, N, x, lambda cls_w: _class_equals(bl, cls_w, tvals, t), w)
    return DomainClaim("m1", "mu", mu.M, mu.terms, mu.n, m, bl.build(out), mu, mu.oracles)


def _fold(C: Circuit, fixed: Sequence[int]) -> Circuit:
    """``restrict`` with constant propagation (rebuilds through a Builder)."""
    bl = Builder()
    blocks = []
    for k, w in enumerate(C.layout):
        if k < len(fixed):
            blocks.append(arith.const_bits(bl, fixed[k], w))
        else:
            blocks.append(bl.inputs(w))
    return bl.build(bl.import_circuit(C, blocks))


def domain_check(claim: DomainClaim, samples_per_time: int = 48, seed: int = 0) -> CheckResult:
    """Check a wrapper claim against the wrapper itself on its domain.

    m1/alpha and m1/mu are exhaustive over ``x < 2^n``. For m1star the
    times ``0, t_M/2, t_M`` are checked with every trace position plus
    random positions below ``bd`` (capped at ``samples_per_time`` each).
    """
    rng = random.Random(seed)
    tvals = _class_t(claim)
    fails, checked = [], 0
    for x in range(1 << claim.n):
        tm = tvals[bitlen(x)]
        if claim.wrapper == "m1":
            z = tuple_code(claim.M, x, tm)
            r = m1_run(z, claim.oracles)
            if claim.kind == "alpha":
                got = int(eval_many(claim.circuit, [(z,)])[0])
                checked += 1
                if got != int(r.accepted):
                    fails.append({"x": x, "z": z, "circuit": got, "wrapper": int(r.accepted)})
                    break
            else:
                expect = snapshot_set(r.utrace)
                got = truth_table(_fold(claim.circuit, [z]), limit=None)
                checked += 1
                if got != expect:
                    v = min(set(got) ^ set(expect))
                    fails.append({"x": x, "w": v, "circuit": int(v in got)})
                    break
            continue
        _, s, q = claim.source.bounds(x)
        for t in sorted({0, tm // 2, tm}):
            Y = run(claim.M, (x,), t, s, q, claim.oracles)
            bound = bd_of(claim.M, (x,), t, s, q)
            members = list(Y.set)
            vs = set(rng.sample(members, min(samples_per_time, len(members))))
            vs |= {rng.randrange(bound) for _ in range(samples_per_time)} | {bound - 1}
            vs = sorted(vs)
            zs = [tuple_code(claim.M, x, t, v, tm) for v in vs]
            got = eval_many(claim.circuit, [(z,) for z in zs])
            for v, z, g in zip(vs, zs, got):
                checked += 1
                want = int(m1star_run(z, claim.oracles).accepted)
                if int(g) != want:
                    fails.append({"x": x, "t": t, "v": v, "circuit": int(g), "wrapper": want})
                    break
            if fails:
                break
        if fails:
            break
    size_ok = claim.size_ok()
    bad = fails[0] if fails else None
    return CheckResult(size_ok and bad is None, f"{claim.wrapper}/{claim.kind}", size_ok,
                       bad is None, checked, bad, claim.report())


# ------------------------------------------------------------ transforms

def _cross_check(claim_name: str, pairs: Iterable[tuple[bool, dict]]) -> dict:
    n = 0
    for ok, where in pairs:
        n += 1
        if not ok:
            raise SynthesisError(f"{claim_name}: composition disagrees with the source at {where}")
    return {"cross_checked": n}


def beta_from_alpha(src: DomainClaim, literal: bool = False, samples: int = 64,
                    seed: int = 0) -> WitnessClaim:
    """``D(x, t, v) = C'(<M, x, t, v, t_M(x)>)`` from an M1* claim.

    By default the pack/unpack pair cancels and the fields are wired
    straight into the M1* core. ``literal=True`` builds the packing
    circuit and inlines ``C'`` unchanged.
    """
    if (src.wrapper, src.kind) != ("m1star", "alpha"):
        raise ValueError("beta_from_alpha needs an alpha claim for M1*")
    mu = src.source
    tvals = _class_t(mu)
    T = bitlen(max(tvals.values()))
    V = mu.circuit.layout[1]
    bl = Builder()
    x = bl.inputs(mu.n)
    t = bl.inputs(T)
    v = bl.inputs(V)
    cls_w = arith.length_onehot(bl, x)
    s_sel = _class_select(bl, cls_w, tvals, T)
    if literal:
        packed = arith.tuple_pack(bl, [arith.const_bits(bl, mu.M), x, t, v, s_sel])
        out = bl.import_circuit(src.circuit, [arith.fit(bl, packed, src.m)])
    else:
        out = _m1star_core(bl, mu, arith.const_bits(bl, mu.M), x, t, v,
                           lambda cw: bl.const(1))
    D = bl.build(out)
    rng = random.Random(seed)
    pts = []
    for _ in range(samples):
        xx = rng.randrange(1 << mu.n)
        tm = tvals[bitlen(xx)]
        tt = rng.randrange(tm + 1)
        _, s, q = mu.bounds(xx)
        vv = rng.randrange(bd_of(mu.M, (xx,), tt, s, q))
        pts.append((xx, tt, vv))
    mine = eval_many(D, pts)
    theirs = eval_many(src.circuit, [(tuple_code(mu.M, a, b, c, tvals[bitlen(a)]),) for a, b, c in pts])
    notes = _cross_check("beta_from_alpha",
                         ((bool(p) == bool(q), pt) for p, q, pt in zip(mine, theirs, pts)))
    terms = mu.terms
    return WitnessClaim("beta", mu.M, terms, mu.n, D, mu.oracles,
                        notes={**notes, "literal": literal, "source": src.report()})


def mu_from_beta(beta: WitnessClaim, step_samples: int = 1, seed: int = 0) -> WitnessClaim:
    """``C(x, v) = D(x, t_M(x), v)``, with the induction re-verified.

    The base case ``D(x, 0, .) = Start`` is checked for every x; the step
    ``D(x, t+1, .) = Next(D(x, t, .))`` at ``step_samples`` random (x, t).
    """
    tvals = _class_t(beta)
    T = beta.circuit.layout[1]
    V = beta.circuit.layout[2]
    for x in range(1 << beta.n):
        _, s, q = beta.bounds(x)
        bound = bd_of(beta.M, (x,), 0, s, q)
        got = NatSet(v for v in truth_table(restrict(beta.circuit, [x, 0]), limit=None) if v < bound)
        if got != NatSet.assemble([start_config(beta.M, (x,), s, q)]):
            raise SynthesisError(f"base case fails at x = {x}")
    rng = random.Random(seed)
    steps = []
    for _ in range(step_samples):
        x = rng.randrange(1 << beta.n)
        tm = tvals[bitlen(x)]
        if tm == 0:
            continue
        t = rng.randrange(tm)
        _, s, q = beta.bounds(x)
        ctx = context(beta.M, (x,), s, q, beta.oracles)
        now = truth_table(restrict(beta.circuit, [x, t]), limit=None).slice(t)
        later = truth_table(restrict(beta.circuit, [x, t + 1]), limit=None).slice(t + 1)
        reason, succ = _next_set(ctx, now)
        if reason or succ != later:
            raise SynthesisError(f"step fails at x = {x}, t = {t}")
        steps.append((x, t))
    bl = Builder()
    x = bl.inputs(beta.n)
    v = bl.inputs(V)
    cls_w = arith.length_onehot(bl, x)
    t_sel = _class_select(bl, cls_w, tvals, T)
    out = bl.import_circuit(beta.circuit, [x, t_sel, v])
    return WitnessClaim("mu", beta.M, beta.terms, beta.n, bl.build(out), beta.oracles,
                        notes={"base_checked": 1 << beta.n, "steps_checked": steps})


def alpha_transfer(src: DomainClaim) -> WitnessClaim:
    """``C(x) = C'(<M, x, t_M(x)>)`` from an M1 alpha claim (pack/unpack cancelled)."""
    if (src.wrapper, src.kind) != ("m1", "alpha"):
        raise ValueError("alpha_transfer needs an alpha claim for M1")
    inner = src.source
    bl = Builder()
    x = bl.inputs(inner.n)
    out = _m1_alpha_core(bl, inner, arith.const_bits(bl, inner.M), x, lambda cw: bl.const(1))
    C = bl.build(out)
    tvals = _class_t(inner)
    xs = list(range(1 << inner.n))
    mine = eval_many(C, [(a,) for a in xs])
    theirs = eval_many(src.circuit, [(tuple_code(inner.M, a, tvals[bitlen(a)]),) for a in xs])
    notes = _cross_check("alpha_transfer",
                         ((bool(p) == bool(q), {"x": a}) for p, q, a in zip(mine, theirs, xs)))
    return WitnessClaim("alpha", inner.M, inner.terms, inner.n, C, inner.oracles,
                        notes={**notes, "source": src.report(),
                               "length_exponent": src.report()["length_exponent"]})


def mu_transfer(src: DomainClaim) -> WitnessClaim:
    """``C(x, v) = G1(C'_<M,x,t_M(x)>, v)``: trace bit v is snapshot cell
    ``<u, i+1>`` for ``v = <u, i>``; the remap is a compiled circuit."""
    if (src.wrapper, src.kind) != ("m1", "mu"):
        raise ValueError("mu_transfer needs a mu claim for M1")
    from .synth import g1_remap
    inner = src.source
    V = inner.circuit.layout[1]
    bl = Builder()
    x = bl.inputs(inner.n)
    v = bl.inputs(V)
    w = g1_remap(bl, v)
    out = _m1_mu_core(bl, inner, arith.const_bits(bl, inner.M), x, lambda cw: bl.const(1), w)
    C = bl.build(out)
    tvals = _class_t(inner)
    pairs = []
    for a in range(1 << inner.n):
        z = tuple_code(inner.M, a, tvals[bitlen(a)])
        mine = truth_table(restrict(C, [a]), limit=None)
        theirs = truth_table(_fold(src.circuit, [z]), limit=None)
        remapped = NatSet(pair(u, i - 1) for u, i in map(unpair, theirs) if i > 0)
        pairs.append((mine == remapped, {"x": a}))
    notes = _cross_check("mu_transfer", pairs)
    return WitnessClaim("mu", inner.M, inner.terms, inner.n, C, inner.oracles,
                        notes={**notes, "source": src.report()})


# ------------------------------------------------------------ corruption

def corruption_point(claim: WitnessClaim, seed: int = 0) -> tuple[int, ...]:
    """An input point of the claim's circuit inside the checked region."""
    rng = random.Random(seed)
    x = rng.randrange(1 << claim.n)
    t, s, q = claim.bounds(x)
    if claim.kind == "alpha":
        return (x,)
    if claim.kind == "mu":
        return (x, rng.randrange(bd_of(claim.M, (x,), t, s, q)))
    tt = rng.randrange(t + 1)
    return (x, tt, rng.randrange(bd_of(claim.M, (x,), tt, s, q)))


def corrupt(claim: WitnessClaim, point: Sequence[int]) -> WitnessClaim:
    """Flip the circuit's output at exactly one input point."""
    return claim.with_circuit(flip_point(claim.circuit, point), corrupted_at=list(point))


CHECKERS = {"mu": mu_check, "alpha": alpha_check, "beta": beta_check}


def check(claim: WitnessClaim) -> CheckResult:
    return CHECKERS[claim.kind](claim)


# ------------------------------------------------------------ pipeline

@dataclass
class PipelineResult:
    claims: dict[str, object]
    checks: dict[str, CheckResult]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.checks.values())

    def summary(self) -> dict:
        return {name: {"ok": r.ok, **r.report} for name, r in sorted(self.checks.items())}


TRANSFER_WIDTH_LIMIT = 22


def pipeline(M: int, terms: WitnessTerms, n: int, oracles: Sequence[NatSet] = (),
             transfers: bool | None = None) -> PipelineResult:
    """Synthesize a mu witness and push it through every transform.

    mu -> alpha -> (M1 alpha) -> alpha; mu -> (M1 mu) -> mu;
    mu -> (M1* alpha) -> beta -> mu. Every intermediate claim is checked.

    The transfer legs through M1 remap trace positions arithmetically, so
    their truth tables enumerate all ``2^V`` positions. By default they run
    only when ``V <= TRANSFER_WIDTH_LIMIT``.
    """
    claims: dict[str, object] = {}
    checks: dict[str, CheckResult] = {}
    mu = claims["mu"] = mu_synthesize(M, terms, n, oracles)
    checks["mu"] = mu_check(mu)
    alpha = claims["alpha"] = alpha_from_mu(mu)
    checks["alpha"] = alpha_check(alpha)
    star = claims["m1star_alpha"] = alpha_for_m1star(mu)
    checks["m1star_alpha"] = domain_check(star)
    beta = claims["beta"] = beta_from_alpha(star)
    checks["beta"] = beta_check(beta)
    back = claims["mu_from_beta"] = mu_from_beta(beta)
    checks["mu_from_beta"] = mu_check(back)
    if transfers is None:
        transfers = mu.circuit.layout[1] <= TRANSFER_WIDTH_LIMIT
    if transfers:
        m1a = claims["m1_alpha"] = alpha_for_m1(alpha)
        checks["m1_alpha"] = domain_check(m1a)
        a2 = claims["alpha_transfer"] = alpha_transfer(m1a)
        checks["alpha_transfer"] = alpha_check(a2)
        m1m = claims["m1_mu"] = mu_for_m1(mu)
        checks["m1_mu"] = domain_check(m1m)
        m2 = claims["mu_transfer"] = mu_transfer(m1m)
        checks["mu_transfer"] = mu_check(m2)
    return PipelineResult(claims, checks)
