"""Deterministic multitape oracle Turing machines.

Conventions
-----------
Symbols are ``BLANK=0, ZERO=1, ONE=2, MARK=3``; cell 0 of every tape holds
``MARK``. Moves are ``L=0, S=1, R=2``. Tapes are ordered inputs, oracles,
works. States are numbered ``0 = start, 1 = accept, 2 = reject`` and, for
machines with oracle tapes, ``3 = query``.

A configuration with ``m`` rows is the set of ``pair(i, j)`` such that bit
``j`` of row ``i`` is 1. Row ``i < m`` packs, per tape ``tau``, the 2-bit
symbol of cell ``i`` at bits ``3*tau, 3*tau+1`` and the position bit
``[head < i]`` at bit ``3*tau+2``. Row ``m`` holds the state number.

Machine code layout (bits read least significant first)::

    gamma(k+1) gamma(l+1) gamma(w+1) gamma(S - S_min + 1)
    [2^l query targets, |S-1| bits each]           (only when l > 0)
    format bit: 0 = dense, 1 = sparse
    dense : one mixed-radix number over all (state, scanned) entries
    sparse: gamma(E+1), then E records (state index, scanned, action)
    ... zero padding up to bit P, then a sentinel 1 at bit P

with ``P = max(stream length, 3T, |S-1|)`` so the code exceeds every row
number and state number. Missing table entries mean "go to reject, write
the scanned symbols, stay". Decoding re-encodes and compares, so every
natural has at most one meaning.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Iterable, Mapping, Sequence

from .encoding import NatSet, bitlen, input_length, pair, rows_needed, unpair

BLANK, ZERO, ONE, MARK = 0, 1, 2, 3
L, S, R = 0, 1, 2
START, ACCEPT, REJECT, QUERY = 0, 1, 2, 3
HALTING = (ACCEPT, REJECT)
SYMBOL_CHARS = "_01>"
MOVE_CHARS = "LSR"
DELTA = (-1, 0, 1)

INPUT, ORACLE, WORK = "input", "oracle", "work"


class MachineError(ValueError):
    pass


def _options(kind: str, a: int) -> tuple[tuple[int, int], ...]:
    """Allowed (write, move) pairs on a tape of ``kind`` scanning ``a``."""
    if a == MARK:
        return ((MARK, S), (MARK, R))
    if kind == INPUT:
        if a == BLANK:
            return ((BLANK, L), (BLANK, S))
        return ((a, L), (a, S), (a, R))
    return tuple((b, d) for b in (BLANK, ZERO, ONE) for d in (L, S, R))


Action = tuple[int, tuple[int, ...], tuple[int, ...]]


@dataclass(frozen=True)
class MachineSpec:
    """A machine with ``k`` input, ``l`` oracle and ``w`` work tapes.

    ``table`` maps ``(state, scanned)`` to ``(new_state, writes, moves)``;
    it is stored sorted and without default entries.
    """

    k: int
    l: int
    w: int
    n_states: int
    table: tuple[tuple[tuple[int, tuple[int, ...]], Action], ...] = ()
    query_targets: tuple[int, ...] = ()

    @staticmethod
    def build(k: int, l: int, w: int, n_states: int,
              transitions: Mapping[tuple[int, tuple[int, ...]], Action] | None = None,
              query_targets: Sequence[int] = ()) -> "MachineSpec":
        probe = MachineSpec(k, l, w, n_states, (), tuple(query_targets))
        probe._check_shape()
        entries = {}
        for (state, scanned), act in (transitions or {}).items():
            scanned = tuple(scanned)
            new, writes, moves = act
            act = (new, tuple(writes), tuple(moves))
            probe._check_entry(state, scanned, act)
            if act != probe.default_action(scanned):
                entries[(state, scanned)] = act
        return MachineSpec(k, l, w, n_states, tuple(sorted(entries.items())),
                           tuple(query_targets))

    @property
    def tapes(self) -> int:
        return self.k + self.l + self.w

    def kind(self, tau: int) -> str:
        if tau < self.k:
            return INPUT
        if tau < self.k + self.l:
            return ORACLE
        return WORK

    @property
    def min_states(self) -> int:
        return 4 if self.l > 0 else 3

    def is_query(self, state: int) -> bool:
        return self.l > 0 and state == QUERY

    @property
    def first_working(self) -> int:
        """States ``0`` and ``first_working..n_states-1`` read the table."""
        return 4 if self.l > 0 else 3

    @property
    def n_working(self) -> int:
        return self.n_states - self.first_working + 1

    def is_working(self, state: int) -> bool:
        return state == START or self.first_working <= state < self.n_states

    def working_index(self, state: int) -> int:
        return 0 if state == START else state - self.first_working + 1

    def working_state(self, index: int) -> int:
        return START if index == 0 else index + self.first_working - 1

    @property
    def working_states(self) -> range | tuple[int, ...]:
        """States that read the transition table (lazy: codes may declare many)."""
        return (START,) + tuple(range(self.first_working, self.n_states)) \
            if self.n_working <= 1 << 16 else _WorkingStates(self)

    @cached_property
    def _lookup(self) -> dict:
        return dict(self.table)

    def default_action(self, scanned: tuple[int, ...]) -> Action:
        return (REJECT, tuple(scanned), (S,) * self.tapes)

    def action(self, state: int, scanned: tuple[int, ...]) -> Action:
        return self._lookup.get((state, tuple(scanned))) or self.default_action(scanned)

    def _check_shape(self) -> None:
        if min(self.k, self.l, self.w) < 0:
            raise MachineError("tape counts must be non-negative")
        if self.n_states < self.min_states:
            raise MachineError(f"need at least {self.min_states} states")
        if self.l > 0:
            if len(self.query_targets) != 1 << self.l:
                raise MachineError("need one query target per oracle answer vector")
            for st in self.query_targets:
                if not 0 <= st < self.n_states:
                    raise MachineError(f"query target {st} out of range")
        elif self.query_targets:
            raise MachineError("query targets given for a machine without oracle tapes")

    def _check_entry(self, state: int, scanned: tuple[int, ...], act: Action) -> None:
        if not self.is_working(state):
            raise MachineError(f"state {state} does not read the transition table")
        new, writes, moves = act
        if len(scanned) != self.tapes or len(writes) != self.tapes or len(moves) != self.tapes:
            raise MachineError("transition arity does not match tape count")
        if not 0 <= new < self.n_states:
            raise MachineError(f"target state {new} out of range")
        for tau, (a, b, d) in enumerate(zip(scanned, writes, moves)):
            if not 0 <= a <= 3:
                raise MachineError(f"bad scanned symbol {a}")
            if (b, d) not in _options(self.kind(tau), a):
                raise MachineError(
                    f"state {state} tape {tau}: writing {SYMBOL_CHARS[b]!r} and moving "
                    f"{MOVE_CHARS[d]} is not allowed on {SYMBOL_CHARS[a]!r}")

    def validate(self) -> None:
        self._check_shape()
        for (state, scanned), act in self.table:
            self._check_entry(state, scanned, act)


class _WorkingStates:
    """Sequence view of the working states of a machine with very many states."""

    def __init__(self, spec: "MachineSpec"):
        self.spec = spec

    def __len__(self) -> int:
        return self.spec.n_working

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < len(self):
            raise IndexError(i)
        return self.spec.working_state(i)

    def __contains__(self, state: object) -> bool:
        return isinstance(state, int) and self.spec.is_working(state)

    def __iter__(self):
        return (self.spec.working_state(i) for i in range(len(self)))


# ---------------------------------------------------------------- bit streams

class _Writer:
    def __init__(self):
        self.value = 0
        self.n = 0

    def bits(self, v: int, width: int) -> None:
        if v < 0 or v >> width:
            raise MachineError("field overflow")
        self.value |= v << self.n
        self.n += width

    def gamma(self, v: int) -> None:
        # v >= 1: (len-1) zeros, a one, then the low len-1 bits
        e = bitlen(v) - 1
        self.bits(0, e)
        self.bits(1, 1)
        self.bits(v & ((1 << e) - 1), e)


class _Reader:
    def __init__(self, value: int, limit: int):
        self.value = value
        self.pos = 0
        self.limit = limit

    def bits(self, width: int) -> int:
        if self.pos + width > self.limit:
            raise MachineError("truncated code")
        v = (self.value >> self.pos) & ((1 << width) - 1)
        self.pos += width
        return v

    def gamma(self) -> int:
        e = 0
        while self.bits(1) == 0:
            e += 1
            if e > 64:
                raise MachineError("gamma field too long")
        return (1 << e) | self.bits(e)


def _scanned_index(scanned: tuple[int, ...]) -> int:
    return sum(a << (2 * tau) for tau, a in enumerate(scanned))


def _scanned_from_index(idx: int, T: int) -> tuple[int, ...]:
    return tuple((idx >> (2 * tau)) & 3 for tau in range(T))


def _action_radix(spec: MachineSpec, scanned: tuple[int, ...]) -> int:
    r = spec.n_states
    for tau, a in enumerate(scanned):
        r *= len(_options(spec.kind(tau), a))
    return r


def _action_index(spec: MachineSpec, scanned, act: Action) -> int:
    new, writes, moves = act
    idx, mult = new, spec.n_states
    for tau, a in enumerate(scanned):
        opts = _options(spec.kind(tau), a)
        idx += mult * opts.index((writes[tau], moves[tau]))
        mult *= len(opts)
    return idx


def _action_from_index(spec: MachineSpec, scanned, idx: int) -> Action:
    new = idx % spec.n_states
    idx //= spec.n_states
    writes, moves = [], []
    for tau, a in enumerate(scanned):
        opts = _options(spec.kind(tau), a)
        b, d = opts[idx % len(opts)]
        idx //= len(opts)
        writes.append(b)
        moves.append(d)
    return new, tuple(writes), tuple(moves)


def _header(spec: MachineSpec) -> _Writer:
    wr = _Writer()
    wr.gamma(spec.k + 1)
    wr.gamma(spec.l + 1)
    wr.gamma(spec.w + 1)
    wr.gamma(spec.n_states - spec.min_states + 1)
    sw = bitlen(spec.n_states - 1)
    for st in spec.query_targets:
        wr.bits(st, sw)
    return wr


def _entries(spec: MachineSpec):
    T = spec.tapes
    for i in range(spec.n_working):
        st = spec.working_state(i)
        for sidx in range(4 ** T):
            yield st, _scanned_from_index(sidx, T)


def _stream(spec: MachineSpec, sparse: bool) -> tuple[int, int]:
    wr = _header(spec)
    wr.bits(int(sparse), 1)
    if not sparse:
        value, mult = 0, 1
        for st, sc in _entries(spec):
            radix = _action_radix(spec, sc)
            value += mult * _action_index(spec, sc, spec.action(st, sc))
            mult *= radix
        wr.bits(value, bitlen(mult - 1))
    else:
        wr.gamma(len(spec.table) + 1)
        state_w = bitlen(spec.n_working - 1)
        for (st, sc), act in spec.table:
            wr.bits(spec.working_index(st), state_w)
            wr.bits(_scanned_index(sc), 2 * spec.tapes)
            wr.bits(_action_index(spec, sc, act), bitlen(_action_radix(spec, sc) - 1))
    return wr.value, wr.n


def _sentinel_position(spec: MachineSpec, stream_len: int) -> int:
    return max(stream_len, 3 * spec.tapes, bitlen(spec.n_states - 1))


def encode_machine(spec: MachineSpec) -> int:
    spec.validate()
    value, n = _stream(spec, True)
    best = value | (1 << _sentinel_position(spec, n))
    # a dense stream spends more than one bit per entry, so with more
    # entries than the sparse stream has bits it cannot produce a smaller code
    if spec.n_working * 4 ** spec.tapes <= n:
        value, n = _stream(spec, False)
        best = min(best, value | (1 << _sentinel_position(spec, n)))
    return best


def _parse(n: int) -> MachineSpec:
    P = bitlen(n) - 1
    rd = _Reader(n, P)
    k = rd.gamma() - 1
    l = rd.gamma() - 1
    w = rd.gamma() - 1
    if k + l + w > 8:
        raise MachineError("too many tapes")
    base = 4 if l > 0 else 3
    n_states = rd.gamma() - 1 + base
    sw = bitlen(n_states - 1)
    targets = tuple(rd.bits(sw) for _ in range(1 << l)) if l > 0 else ()
    shell = MachineSpec(k, l, w, n_states, (), targets)
    shell._check_shape()
    sparse = rd.bits(1)
    table = {}
    # every dense entry and every sparse record takes at least one bit
    room = P - rd.pos
    if not sparse and shell.n_working * 4 ** shell.tapes > room:
        raise MachineError("dense table longer than the code")
    if not sparse:
        entries = list(_entries(shell))
        radices = [_action_radix(shell, sc) for _, sc in entries]
        total = 1
        for r in radices:
            total *= r
        value = rd.bits(bitlen(total - 1))
        if value >= total:
            raise MachineError("dense table out of range")
        for (st, sc), r in zip(entries, radices):
            value, idx = divmod(value, r)
            table[(st, sc)] = _action_from_index(shell, sc, idx)
    else:
        count = rd.gamma() - 1
        if count > room:
            raise MachineError("more records than the code can hold")
        state_w = bitlen(shell.n_working - 1)
        for _ in range(count):
            si = rd.bits(state_w)
            if si >= shell.n_working:
                raise MachineError("state index out of range")
            sc = _scanned_from_index(rd.bits(2 * shell.tapes), shell.tapes)
            r = _action_radix(shell, sc)
            idx = rd.bits(bitlen(r - 1))
            if idx >= r:
                raise MachineError("action index out of range")
            table[(shell.working_state(si), sc)] = _action_from_index(shell, sc, idx)
    return MachineSpec.build(k, l, w, n_states, table, targets)


@lru_cache(maxsize=4096)
def decode_machine(n: int) -> MachineSpec | None:
    """The machine coded by ``n``, or ``None`` if ``n`` is not a code."""
    if n <= 0:
        return None
    try:
        spec = _parse(n)
        return spec if encode_machine(spec) == n else None
    except MachineError:
        return None


def is_suitable(code: int, k: int, l: int) -> bool:
    spec = decode_machine(code)
    return spec is not None and spec.k == k and spec.l == l


# ------------------------------------------------------------ configurations

@dataclass(frozen=True)
class Config:
    state: int
    heads: tuple[int, ...]
    cells: tuple[tuple[int, ...], ...]  # per tape, rows 0..m-1

    @property
    def m(self) -> int:
        return len(self.cells[0]) if self.cells else 0

    def row_value(self, i: int) -> int:
        v = 0
        for tau, (tape, h) in enumerate(zip(self.cells, self.heads)):
            v |= (tape[i] | (int(h < i) << 2)) << (3 * tau)
        return v

    def to_set(self, m: int | None = None) -> NatSet:
        m = self.m if m is None else m
        out = []
        for i in range(m):
            r = self.row_value(i) if self.cells else 0
            j = 0
            while r:
                if r & 1:
                    out.append(pair(i, j))
                r >>= 1
                j += 1
        st, j = self.state, 0
        while st:
            if st & 1:
                out.append(pair(m, j))
            st >>= 1
            j += 1
        return NatSet(out)

    def render(self) -> str:
        lines = [f"state {self.state}"]
        for tau, (tape, h) in enumerate(zip(self.cells, self.heads)):
            body = "".join(SYMBOL_CHARS[c] for c in tape).rstrip("_") or ">"
            lines.append(f"tape {tau}: {body}  head {h}")
        return "\n".join(lines)


def layout_rows(inputs: Sequence[int], s: int, q: int) -> int:
    return rows_needed(inputs, s, q)


def start_configuration(spec: MachineSpec, inputs: Sequence[int], m: int) -> Config:
    cells = []
    for tau in range(spec.tapes):
        tape = [BLANK] * m
        tape[0] = MARK
        if tau < spec.k:
            bits = bin(inputs[tau])[2:] if inputs[tau] else ""
            for c, b in enumerate(bits, 1):
                tape[c] = ONE if b == "1" else ZERO
        cells.append(tuple(tape))
    return Config(START, (0,) * spec.tapes, tuple(cells))


def start_config(M: int, inputs: Sequence[int], s: int, q: int) -> NatSet:
    """The start configuration set; empty when ``M`` is not suitable."""
    spec = decode_machine(M)
    if spec is None or spec.k != len(inputs):
        return NatSet()
    m = rows_needed(inputs, s, q)
    return start_configuration(spec, inputs, m).to_set(m)


def start_pred(M: int, inputs: Sequence[int], s: int, q: int, v: int) -> int:
    return int(v in start_config(M, inputs, s, q))


Reader = Callable[[int], bool]


def locate_head(read: Reader, tau: int, m: int) -> int:
    """Canonical head decode: binary search for the position-bit edge.

    Returns -1 when the position bit of row 0 is set (no valid position).
    """
    if read(pair(0, 3 * tau + 2)):
        return -1
    lo, hi = 0, m
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if read(pair(mid, 3 * tau + 2)):
            hi = mid
        else:
            lo = mid
    return lo


def read_symbol(read: Reader, tau: int, i: int) -> int:
    return int(read(pair(i, 3 * tau))) | (int(read(pair(i, 3 * tau + 1))) << 1)


@dataclass(frozen=True)
class StepPlan:
    """Decoded step; ``fail`` names the violated check, or is ``None``."""

    fail: str | None
    m: int = 0
    state: int = 0
    heads: tuple[int, ...] = ()
    new_state: int = 0
    writes: tuple[int, ...] = ()
    new_heads: tuple[int, ...] = ()
    queries: tuple[int, ...] = ()


def plan_step(M: int, inputs: Sequence[int], s: int, q: int,
              oracles: Sequence[NatSet], read: Reader) -> StepPlan:
    """Lines 1-3 of the step machine on a configuration given by ``read``."""
    spec = decode_machine(M)
    if spec is None or spec.k != len(inputs) or spec.l != len(oracles):
        return StepPlan("unsuitable machine")
    m = rows_needed(inputs, s, q)
    code_len = bitlen(M)
    state = 0
    for j in range(code_len):
        if read(pair(m, j)):
            state |= 1 << j
    if state >= spec.n_states:
        return StepPlan("state out of range", m)
    T = spec.tapes
    qlen = bitlen(q)
    heads = tuple(locate_head(read, tau, m) for tau in range(T))
    for tau, h in enumerate(heads):
        if h < 0:
            return StepPlan(f"tape {tau} has no head position", m)
        kind = spec.kind(tau)
        if kind == ORACLE and h >= qlen:
            return StepPlan(f"oracle head {tau} at {h} >= |q| = {qlen}", m)
        if kind == WORK and h >= s:
            return StepPlan(f"work head {tau} at {h} >= s = {s}", m)
    scanned = tuple(read_symbol(read, tau, h) for tau, h in enumerate(heads))
    queries: tuple[int, ...] = ()
    if state in HALTING:
        new_state, writes, moves = state, scanned, (S,) * T
    elif spec.is_query(state):
        answer = 0
        qs = []
        for o in range(spec.l):
            tau = spec.k + o
            value = 0
            for c in range(1, min(m, qlen)):
                sym = read_symbol(read, tau, c)
                if sym not in (ZERO, ONE):
                    break
                value = 2 * value + (sym == ONE)
            qs.append(value)
            answer |= int(value in oracles[o]) << o
        queries = tuple(qs)
        new_state, writes, moves = spec.query_targets[answer], scanned, (S,) * T
    else:
        new_state, writes, moves = spec.action(state, scanned)
    new_heads = tuple(h + DELTA[d] for h, d in zip(heads, moves))
    xlen = input_length(inputs)
    for tau, h in enumerate(new_heads):
        kind = spec.kind(tau)
        if h < 0:
            return StepPlan(f"tape {tau} head moves off the left end", m)
        if kind == INPUT and h >= xlen + 2:
            return StepPlan(f"input head {tau} moves to {h} >= |x|+2", m)
        if kind == ORACLE and h >= qlen:
            return StepPlan(f"oracle head {tau} moves to {h} >= |q| = {qlen}", m)
        if kind == WORK and h >= s:
            return StepPlan(f"work head {tau} moves to {h} >= s = {s}", m)
    return StepPlan(None, m, state, heads, new_state, writes, new_heads, queries)


def plan_bit(plan: StepPlan, read: Reader, v: int) -> int:
    """Line 5-9 output bit for ``v`` of a non-failing plan."""
    i, j = unpair(v)
    m = plan.m
    if i > m:
        return 0
    if i == m:
        return (plan.new_state >> j) & 1
    tau, f = divmod(j, 3)
    if tau >= len(plan.heads):
        return 0
    if f == 2:
        return int(plan.new_heads[tau] < i)
    if i == plan.heads[tau]:
        return (plan.writes[tau] >> f) & 1
    return int(read(pair(i, j)))


def plan_config(plan: StepPlan, read: Reader) -> Config:
    cells = []
    for tau, h in enumerate(plan.heads):
        tape = [read_symbol(read, tau, i) for i in range(plan.m)]
        tape[h] = plan.writes[tau]
        cells.append(tuple(tape))
    return Config(plan.new_state, plan.new_heads, tuple(cells))


@dataclass(frozen=True)
class StepOutcome:
    fail: str | None
    config: Config | None = None
    m: int = 0

    @property
    def kind(self) -> str:
        return "Fail" if self.fail else "Bits"

    def bit(self, v: int) -> int:
        if self.fail:
            return 0
        return int(v in self.as_set())

    @cached_property
    def _set(self) -> NatSet:
        return self.config.to_set(self.m) if self.config else NatSet()

    def as_set(self) -> NatSet:
        return self._set


def succ_step(M: int, inputs: Sequence[int], s: int, q: int,
              oracles: Sequence[NatSet], X: NatSet | Iterable[int]) -> StepOutcome:
    X = X if isinstance(X, NatSet) else NatSet(X)
    plan = plan_step(M, inputs, s, q, oracles, X.__contains__)
    if plan.fail:
        return StepOutcome(plan.fail, None, plan.m)
    return StepOutcome(None, plan_config(plan, X.__contains__), plan.m)


def fail_pred(M: int, inputs, s: int, q: int, oracles, X) -> bool:
    X = X if isinstance(X, NatSet) else NatSet(X)
    return plan_step(M, inputs, s, q, oracles, X.__contains__).fail is not None


def next_pred(M: int, inputs, s: int, q: int, oracles, X, v: int) -> int:
    X = X if isinstance(X, NatSet) else NatSet(X)
    plan = plan_step(M, inputs, s, q, oracles, X.__contains__)
    if plan.fail:
        return 0
    return plan_bit(plan, X.__contains__, v)


def decode_config(X: NatSet, M: int, inputs: Sequence[int], s: int, q: int) -> Config | None:
    """Best-effort decode of a configuration set (canonical head decode)."""
    spec = decode_machine(M)
    if spec is None:
        return None
    m = rows_needed(inputs, s, q)
    read = X.__contains__
    state = sum(1 << j for j in range(bitlen(M)) if read(pair(m, j)))
    heads = tuple(locate_head(read, tau, m) for tau in range(spec.tapes))
    cells = tuple(tuple(read_symbol(read, tau, i) for i in range(m))
                  for tau in range(spec.tapes))
    return Config(state, heads, cells)


def is_halting_set(X: NatSet, M: int, inputs, s: int, q: int) -> bool:
    m = rows_needed(inputs, s, q)
    state = sum(1 << j for j in range(bitlen(M)) if pair(m, j) in X)
    return state in HALTING


def state_of_set(X: NatSet, M: int, inputs, s: int, q: int) -> int:
    m = rows_needed(inputs, s, q)
    return sum(1 << j for j in range(bitlen(M)) if pair(m, j) in X)


def succ_query_bound(M: int, inputs: Sequence[int], s: int, q: int) -> int:
    """Upper bound on the X-queries ``plan_step`` + ``plan_bit`` make."""
    spec = decode_machine(M)
    T = spec.tapes if spec else 0
    l = spec.l if spec else 0
    m = rows_needed(inputs, s, q)
    return bitlen(M) + T * (bitlen(m) + 2) + 2 * T + 2 * l * bitlen(q) + 4


class CountingReader:
    """Wraps a reader and records the queried positions in order."""

    def __init__(self, read: Reader):
        self._read = read
        self.log: list[int] = []

    def __call__(self, v: int) -> bool:
        self.log.append(v)
        return self._read(v)
