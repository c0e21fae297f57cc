"""Machine computations as circuits.

Two compilers share one transition stage:

* the *raw step* compiler reproduces the step machine on an arbitrary bit
  vector ``X`` (binary-search head decode, every failure check), giving
  circuits for ``Next``, ``Fail`` and ``Start``;
* the *tableau* compiler unrolls a machine for ``t`` steps on symbolic
  input bits, with one-hot states and heads, and emits a circuit
  ``C(x, v) = [v in Y(x)]`` describing the whole computation.

Inputs of length ``n`` are split into classes by their bit length; each
class has its own row count, bounds and step count, selected by a one-hot
length decoder.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from . import arith
from .circuit import Builder, Circuit, CircuitError, truth_table as tt_of
from .encoding import NatSet, bitlen, pair
from .machine import (ACCEPT, HALTING, INPUT, L, ORACLE, R, S, WORK, MachineSpec,
                      decode_machine, next_pred, fail_pred, start_pred)

__all__ = [
    "Bounds", "LengthClass", "StepFamily", "REGISTRY", "bounds_from_terms", "compile_accept",
    "compile_computation", "compile_fail", "compile_g1", "compile_next", "compile_predicate",
    "compile_start", "from_truth_table", "length_classes", "reference_predicate",
    "representative", "tableau_bits", "truth_table_of",
]

Bounds = Callable[[int], tuple[int, int, int]]  # length class -> (t, s, q)


@dataclass(frozen=True)
class LengthClass:
    length: int
    t: int
    s: int
    q: int

    @property
    def qlen(self) -> int:
        return bitlen(self.q)

    def m(self) -> int:
        return max(self.s, self.length + 2, self.qlen)

    def bd0(self, M: int) -> int:
        return pair(self.m() + 1, bitlen(M))

    def bd(self, M: int) -> int:
        return pair(self.t, self.bd0(M))


def length_classes(n: int, bounds: Bounds) -> list[LengthClass]:
    """Classes ``l = 0..n``; ``bounds(l)`` gives ``(t, s, q)`` for inputs of length l."""
    out = []
    for l in range(n + 1):
        t, s, q = bounds(l)
        out.append(LengthClass(l, t, s, q))
    return out


def representative(l: int) -> int:
    """Smallest input of bit length ``l`` (bounds are evaluated on it)."""
    return 0 if l == 0 else 1 << (l - 1)


def bounds_from_terms(witness) -> Bounds:
    return lambda l: witness.bounds((representative(l),))


# ------------------------------------------------------- transition stage

@dataclass
class StepWires:
    new_state: dict[int, int]           # state -> one-hot wire
    writes: list[tuple[int, int]]       # per tape (bit0, bit1)
    moves: list[dict[int, int]]         # per tape move -> one-hot wire


def _symbol_onehot(bl: Builder, b0: int, b1: int) -> list[int]:
    n0, n1 = bl.NOT(b0), bl.NOT(b1)
    return [bl.AND(n0, n1), bl.AND(b0, n1), bl.AND(n0, b1), bl.AND(b0, b1)]


def transition(bl: Builder, spec: MachineSpec, state: Mapping[int, int],
               scanned: Sequence[tuple[int, int]], answers: Sequence[int] = ()) -> StepWires:
    """One step of the finite control on one-hot ``state``.

    ``scanned`` holds the two bits of each scanned symbol; ``answers`` the
    oracle answer wires (used in the query state only).
    """
    T = spec.tapes
    onehots = [_symbol_onehot(bl, b0, b1) for b0, b1 in scanned]
    ns: dict[int, list[int]] = {}
    wr: list[list[list[int]]] = [[[], []] for _ in range(T)]
    mv: list[dict[int, list[int]]] = [{L: [], S: [], R: []} for _ in range(T)]

    def emit(cond: int, new: int, writes, moves, keep_scanned: bool) -> None:
        ns.setdefault(new, []).append(cond)
        for tau in range(T):
            if keep_scanned:
                for f in (0, 1):
                    wr[tau][f].append(bl.AND(cond, scanned[tau][f]))
            else:
                for f in (0, 1):
                    if (writes[tau] >> f) & 1:
                        wr[tau][f].append(cond)
            mv[tau][moves[tau]].append(cond)

    for st, w in state.items():
        if st in HALTING:
            emit(w, st, None, (S,) * T, True)
        elif spec.is_query(st):
            for a in range(1 << spec.l):
                hit = bl.AND_all(answers[o] if (a >> o) & 1 else bl.NOT(answers[o])
                                 for o in range(spec.l))
                emit(bl.AND(w, hit), spec.query_targets[a], None, (S,) * T, True)
        else:
            _emit_table(bl, spec, st, w, onehots, emit)
    return StepWires({st: bl.OR_all(c) for st, c in ns.items()},
                     [(bl.OR_all(a), bl.OR_all(b)) for a, b in wr],
                     [{d: bl.OR_all(c) for d, c in m.items()} for m in mv])


def _emit_table(bl, spec, st, w, onehots, emit):
    T = spec.tapes

    def rec(tau: int, cond: int, scanned: tuple[int, ...]):
        if tau == T:
            new, writes, moves = spec.action(st, scanned)
            emit(cond, new, writes, moves, False)
            return
        for a in range(4):
            rec(tau + 1, bl.AND(cond, onehots[tau][a]), scanned + (a,))

    rec(0, w, ())


def _shift_heads(bl: Builder, h: Sequence[int], moves: Mapping[int, int], size: int) -> list[int]:
    """One-hot head after the move, over positions ``0..size-1``."""
    out = []
    for p in range(size):
        terms = []
        if p + 1 < len(h):
            terms.append(bl.AND(h[p + 1], moves[L]))
        if p < len(h):
            terms.append(bl.AND(h[p], moves[S]))
        if 0 <= p - 1 < len(h):
            terms.append(bl.AND(h[p - 1], moves[R]))
        out.append(bl.OR_all(terms))
    return out


def _oracle_member(bl: Builder, cells: Sequence[tuple[int, int]], members: NatSet) -> int:
    """Membership of the bit-prefix of ``cells`` (read until a non-bit)."""
    C = len(cells)
    isbit = [bl.XOR(b0, b1) for b0, b1 in cells]
    zero_run = [bl.const(1)]
    for b0, b1 in cells:
        zero_run.append(bl.AND(zero_run[-1], bl.AND(b0, bl.NOT(b1))))
    prefix_ok = [bl.const(1)]
    for ib in isbit:
        prefix_ok.append(bl.AND(prefix_ok[-1], ib))
    terms = []
    for Lc in range(C + 1):
        valid = prefix_ok[Lc] if Lc == C else bl.AND(prefix_ok[Lc], bl.NOT(isbit[Lc]))
        hits = []
        for e in members:
            b = bitlen(e)
            if b > Lc:
                break
            # cells 1..Lc - b are ZERO, the remaining b cells spell e MSB-first
            lead = zero_run[Lc - b]
            match = [cells[Lc - b + k][1] if (e >> (b - 1 - k)) & 1 else bl.NOT(cells[Lc - b + k][1])
                     for k in range(b)]
            hits.append(bl.AND(lead, bl.AND_all(match)))
        if hits:
            terms.append(bl.AND(valid, bl.OR_all(hits)))
    return bl.OR_all(terms)


def position_mux(bl: Builder, v: Sequence[int], leaves: Mapping[int, int]) -> int:
    """``OR_p [v == p] & leaves[p]`` as a shared MSB-first decision trie."""
    items = sorted((p, w) for p, w in leaves.items()
                   if bl.const_value(w) != 0 and not p >> len(v))

    def rec(k: int, group: list[tuple[int, int]]) -> int:
        if not group:
            return bl.const(0)
        if k < 0:
            return group[0][1]
        ones = [g for g in group if (g[0] >> k) & 1]
        zeros = [g for g in group if not (g[0] >> k) & 1]
        return bl.MUX(v[k], rec(k - 1, ones), rec(k - 1, zeros))

    return rec(len(v) - 1, items)


# ------------------------------------------------------- raw step circuit

@dataclass
class RawStep:
    fail: int
    bits: dict[int, int]   # position w = pair(i, j) -> output wire (when not failing)


def raw_step(bl: Builder, spec: MachineSpec, M: int, cls: LengthClass,
             read: Callable[[int], int], oracles: Sequence[NatSet]) -> RawStep:
    """Gate-level step machine on the configuration bits given by ``read``."""
    m, s, qlen = cls.m(), cls.s, cls.qlen
    T = spec.tapes
    state_bits = [read(pair(m, j)) for j in range(bitlen(M))]
    fails = [bl.NOT(arith.lt_const(bl, state_bits, spec.n_states))]
    state = {st: arith.eq_const(bl, state_bits, st) for st in range(spec.n_states)}
    heads, scanned = [], []
    for tau in range(T):
        h, invalid = _search_head(bl, read, tau, m)
        fails.append(invalid)
        kind = spec.kind(tau)
        if kind == ORACLE:
            fails.extend(h[p] for p in range(qlen, m))
        elif kind == WORK:
            fails.extend(h[p] for p in range(s, m))
        heads.append(h)
        scanned.append(tuple(bl.OR_all(bl.AND(h[p], read(pair(p, 3 * tau + f))) for p in range(m))
                             for f in (0, 1)))
    answers = []
    for o in range(spec.l):
        tau = spec.k + o
        cells = [(read(pair(c, 3 * tau)), read(pair(c, 3 * tau + 1)))
                 for c in range(1, min(m, qlen))]
        answers.append(_oracle_member(bl, cells, oracles[o]))
    step = transition(bl, spec, state, scanned, answers)
    new_heads = []
    for tau, h in enumerate(heads):
        nh = _shift_heads(bl, h, step.moves[tau], m + 1)
        fails.append(bl.AND(h[0], step.moves[tau][L]))
        kind = spec.kind(tau)
        limit = {INPUT: cls.length + 2, ORACLE: qlen, WORK: s}[kind]
        fails.extend(nh[p] for p in range(limit, m + 1))
        new_heads.append(nh)
    fail = bl.OR_all(fails)
    bits: dict[int, int] = {}
    for j in range(bitlen(spec.n_states - 1)):
        bits[pair(m, j)] = bl.OR_all(w for st, w in step.new_state.items() if (st >> j) & 1)
    for tau in range(T):
        prefix = _prefix_or(bl, new_heads[tau])
        for i in range(m):
            bits[pair(i, 3 * tau + 2)] = prefix[i]
            for f in (0, 1):
                bits[pair(i, 3 * tau + f)] = bl.MUX(heads[tau][i], step.writes[tau][f],
                                                    read(pair(i, 3 * tau + f)))
    return RawStep(fail, bits)


def _prefix_or(bl: Builder, h: Sequence[int]) -> list[int]:
    """``out[i] = OR_{p < i} h[p]`` (the position bit of row i)."""
    out, acc = [], bl.const(0)
    for p in range(len(h)):
        out.append(acc)
        acc = bl.OR(acc, h[p])
    out.append(acc)
    return out


def _search_head(bl: Builder, read, tau: int, m: int) -> tuple[list[int], int]:
    """One-hot result of the binary search over position bits."""
    h = [bl.const(0)] * m
    invalid = read(pair(0, 3 * tau + 2))

    def rec(lo: int, hi: int, cond: int):
        if hi - lo <= 1:
            h[lo] = bl.OR(h[lo], cond)
            return
        mid = (lo + hi) // 2
        b = read(pair(mid, 3 * tau + 2))
        rec(lo, mid, bl.AND(cond, b))
        rec(mid, hi, bl.AND(cond, bl.NOT(b)))

    rec(0, m, bl.NOT(invalid))
    return h, invalid


def start_bits(bl: Builder, spec: MachineSpec, cls: LengthClass, x: Sequence[int]) -> dict[int, int]:
    """Start configuration bits for inputs of length ``cls.length``."""
    m, l = cls.m(), cls.length
    bits: dict[int, int] = {}
    for tau in range(spec.tapes):
        for i in range(m):
            bits[pair(i, 3 * tau + 2)] = bl.const(int(i > 0))
            if i == 0:
                b0, b1 = bl.const(1), bl.const(1)
            elif tau < spec.k and i <= l:
                xb = x[l - i]
                b0, b1 = bl.NOT(xb), xb
            else:
                b0 = b1 = bl.const(0)
            bits[pair(i, 3 * tau)] = b0
            bits[pair(i, 3 * tau + 1)] = b1
    return bits


# ---------------------------------------------- compile_predicate registry

@dataclass
class StepFamily:
    """Parameters shared by the step predicates for one machine and length."""

    M: int
    n: int
    bounds: Bounds
    oracles: tuple[NatSet, ...] = ()

    @property
    def spec(self) -> MachineSpec:
        spec = decode_machine(self.M)
        if spec is None:
            raise CircuitError("not a machine code")
        if spec.k != 1:
            raise CircuitError("step circuits are built for one input tape")
        return spec

    @property
    def classes(self) -> list[LengthClass]:
        return length_classes(self.n, self.bounds)

    def config_width(self) -> int:
        return max(c.bd0(self.M) for c in self.classes)

    def position_width(self) -> int:
        return bitlen(self.config_width() - 1)

    def trace_width(self) -> int:
        return bitlen(max(c.bd(self.M) for c in self.classes) - 1)


def compile_next(fam: StepFamily) -> Circuit:
    """Blocks ``(x, X, v)``: the successor bit ``v`` of configuration ``X``."""
    spec = fam.spec
    bl = Builder()
    x = bl.inputs(fam.n)
    X = bl.inputs(fam.config_width())
    v = bl.inputs(fam.position_width())
    cls_w = arith.length_onehot(bl, x)
    leaves: dict[int, list[int]] = {}
    for cls in fam.classes:
        st = raw_step(bl, spec, fam.M, cls, lambda w: X[w], fam.oracles)
        ok = bl.AND(cls_w[cls.length], bl.NOT(st.fail))
        for w, wire in st.bits.items():
            leaves.setdefault(w, []).append(bl.AND(ok, wire))
    out = position_mux(bl, v, {w: bl.OR_all(ws) for w, ws in leaves.items()})
    return bl.build(out)


def compile_fail(fam: StepFamily) -> Circuit:
    """Blocks ``(x, X)``: whether the step on ``X`` fails."""
    spec = fam.spec
    bl = Builder()
    x = bl.inputs(fam.n)
    X = bl.inputs(fam.config_width())
    cls_w = arith.length_onehot(bl, x)
    terms = [bl.AND(cls_w[c.length], raw_step(bl, spec, fam.M, c, lambda w: X[w], fam.oracles).fail)
             for c in fam.classes]
    return bl.build(bl.OR_all(terms))


def compile_start(fam: StepFamily) -> Circuit:
    """Blocks ``(x, v)``: membership of ``v`` in the start configuration."""
    spec = fam.spec
    bl = Builder()
    x = bl.inputs(fam.n)
    v = bl.inputs(fam.position_width())
    cls_w = arith.length_onehot(bl, x)
    leaves: dict[int, list[int]] = {}
    for cls in fam.classes:
        for w, wire in start_bits(bl, spec, cls, x).items():
            leaves.setdefault(w, []).append(bl.AND(cls_w[cls.length], wire))
    return bl.build(position_mux(bl, v, {w: bl.OR_all(ws) for w, ws in leaves.items()}))


def accept_positions(fam: StepFamily, cls: LengthClass) -> tuple[int, list[int]]:
    """Positions holding the final state: ``pair(t, pair(m, j))``."""
    m = cls.m()
    return cls.t, [pair(cls.t, pair(m, j)) for j in range(bitlen(fam.M))]


def accept_wire(bl: Builder, fam: StepFamily, cls_w: Sequence[int],
                read_trace: Callable[[LengthClass, int], int]) -> int:
    """``A``: the state in the last configuration is the accepting state."""
    terms = []
    for cls in fam.classes:
        _, pos = accept_positions(fam, cls)
        bits = [read_trace(cls, p) for p in pos]
        terms.append(bl.AND(cls_w[cls.length], arith.eq_const(bl, bits, ACCEPT)))
    return bl.OR_all(terms)


def compile_accept(fam: StepFamily) -> Circuit:
    """Blocks ``(x, Y)``: acceptance read off a computation set ``Y``."""
    bl = Builder()
    x = bl.inputs(fam.n)
    width = fam.trace_width()
    Y = bl.inputs(1 << width if width <= 22 else 0)
    if not Y:
        raise CircuitError("trace block too wide for a standalone acceptance circuit")
    cls_w = arith.length_onehot(bl, x)
    out = accept_wire(bl, fam, cls_w, lambda cls, p: Y[p] if p < len(Y) else bl.const(0))
    return bl.build(out)


def g1_remap(bl: Builder, v: Sequence[int]) -> list[int]:
    """``pair(u, i) -> pair(u, i + 1)``: the snapshot cell of trace bit v.

    ``pair(u, i+1) = pair(u, i) + (u + i) + 2``; ``u + i`` is the diagonal
    ``isqrt(8v+1)`` step, recovered from the unpairing circuit.
    """
    u, i = arith.unpair(bl, v)
    diag = arith.add(bl, u, i)
    return arith.add(bl, arith.add_const(bl, diag, 2), v)


def compile_g1(width: int, snapshot_width: int) -> Circuit:
    """Blocks ``(S, v)``: bit ``pair(u, i+1)`` of a snapshot set ``S``."""
    bl = Builder()
    Sb = bl.inputs(snapshot_width)
    v = bl.inputs(width)
    w = g1_remap(bl, v)
    leaves = {p: Sb[p] for p in range(snapshot_width)}
    return bl.build(position_mux(bl, w, leaves))


def from_truth_table(members: NatSet | Sequence[int], width: int) -> Circuit:
    """Fallback compiler: any function of ``width`` bits from its truth table."""
    bl = Builder()
    v = bl.inputs(width)
    one = bl.const(1)
    return bl.build(position_mux(bl, v, {p: one for p in members if not p >> width}))


REGISTRY = {
    "next": compile_next,
    "fail": compile_fail,
    "start": compile_start,
    "accept": compile_accept,
}


def compile_predicate(name: str, *args, **kwargs) -> Circuit:
    """Compile a registered predicate, or a truth table with ``name="table"``."""
    if name == "table":
        return from_truth_table(*args, **kwargs)
    if name == "g1":
        return compile_g1(*args, **kwargs)
    if name not in REGISTRY:
        raise CircuitError(f"no compiler registered for {name!r}; pass a truth table instead")
    return REGISTRY[name](*args, **kwargs)


def reference_predicate(name: str, fam: StepFamily) -> Callable:
    """The Python predicate a registered circuit must agree with."""
    def cls_of(x):
        return fam.classes[bitlen(x)]

    if name == "next":
        def f(x, X, v):
            c = cls_of(x)
            return next_pred(fam.M, (x,), c.s, c.q, fam.oracles, X, v)
    elif name == "fail":
        def f(x, X):
            c = cls_of(x)
            return int(fail_pred(fam.M, (x,), c.s, c.q, fam.oracles, X))
    elif name == "start":
        def f(x, v):
            c = cls_of(x)
            return start_pred(fam.M, (x,), c.s, c.q, v)
    else:
        raise KeyError(name)
    return f


# ------------------------------------------------------------- tableau

@dataclass
class Snapshot:
    state: dict[int, int]
    heads: list[list[int]]
    cells: list[list[tuple[int, int]]]


def _tableau_start(bl: Builder, spec: MachineSpec, cls: LengthClass, x) -> Snapshot:
    m, l = cls.m(), cls.length
    state = {st: bl.const(int(st == 0)) for st in range(spec.n_states)}
    heads, cells = [], []
    for tau in range(spec.tapes):
        heads.append([bl.const(int(p == 0)) for p in range(m)])
        row = []
        for i in range(m):
            if i == 0:
                row.append((bl.const(1), bl.const(1)))
            elif tau < spec.k and i <= l:
                xb = x[l - i]
                row.append((bl.NOT(xb), xb))
            else:
                row.append((bl.const(0), bl.const(0)))
        cells.append(row)
    return Snapshot(state, heads, cells)


def _tableau_step(bl: Builder, spec: MachineSpec, cls: LengthClass, snap: Snapshot,
                  oracles: Sequence[NatSet]) -> Snapshot:
    m = cls.m()
    T = spec.tapes
    scanned = []
    for tau in range(T):
        h, row = snap.heads[tau], snap.cells[tau]
        scanned.append(tuple(bl.OR_all(bl.AND(h[p], row[p][f]) for p in range(m)) for f in (0, 1)))
    answers = []
    for o in range(spec.l):
        tau = spec.k + o
        answers.append(_oracle_member(bl, snap.cells[tau][1:min(m, cls.qlen)], oracles[o]))
    step = transition(bl, spec, snap.state, scanned, answers)
    heads, cells = [], []
    for tau in range(T):
        h = snap.heads[tau]
        heads.append(_shift_heads(bl, h, step.moves[tau], m))
        w0, w1 = step.writes[tau]
        cells.append([(bl.MUX(h[p], w0, c0), bl.MUX(h[p], w1, c1))
                      for p, (c0, c1) in enumerate(snap.cells[tau])])
    state = {st: step.new_state.get(st, bl.const(0)) for st in range(spec.n_states)}
    return Snapshot(state, heads, cells)


def _snapshot_bits(bl: Builder, spec: MachineSpec, cls: LengthClass, snap: Snapshot) -> dict[int, int]:
    m = cls.m()
    bits = {}
    for j in range(bitlen(spec.n_states - 1)):
        bits[pair(m, j)] = bl.OR_all(w for st, w in snap.state.items() if (st >> j) & 1)
    for tau in range(spec.tapes):
        prefix = _prefix_or(bl, snap.heads[tau])
        for i in range(m):
            bits[pair(i, 3 * tau + 2)] = prefix[i]
            bits[pair(i, 3 * tau)] = snap.cells[tau][i][0]
            bits[pair(i, 3 * tau + 1)] = snap.cells[tau][i][1]
    return bits


def tableau_bits(bl: Builder, fam: StepFamily, x: Sequence[int]) -> dict[int, dict[int, int]]:
    """Per length class, the wire of every trace position ``pair(u, w)``."""
    spec = fam.spec
    out: dict[int, dict[int, int]] = {}
    for cls in fam.classes:
        snap = _tableau_start(bl, spec, cls, x)
        bits: dict[int, int] = {}
        for u in range(cls.t + 1):
            if u:
                snap = _tableau_step(bl, spec, cls, snap, fam.oracles)
            for w, wire in _snapshot_bits(bl, spec, cls, snap).items():
                bits[pair(u, w)] = wire
        out[cls.length] = bits
    return out


def compile_computation(fam: StepFamily) -> Circuit:
    """Blocks ``(x, v)``: ``[v in Y(x)]`` for the computation on ``x``."""
    bl = Builder()
    x = bl.inputs(fam.n)
    v = bl.inputs(fam.trace_width())
    cls_w = arith.length_onehot(bl, x)
    per_class = tableau_bits(bl, fam, x)
    leaves: dict[int, list[int]] = {}
    for l, bits in per_class.items():
        for p, wire in bits.items():
            leaves.setdefault(p, []).append(bl.AND(cls_w[l], wire))
    return bl.build(position_mux(bl, v, {p: bl.OR_all(ws) for p, ws in leaves.items()}))


def truth_table_of(C: Circuit) -> NatSet:
    return tt_of(C, limit=None)
