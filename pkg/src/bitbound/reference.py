"""Second implementation of the computation semantics, for cross-checking.

Nothing here touches the step planner, the trace module or the set
decoder: machines are simulated on plain Python lists and configurations
are turned into sets by a separate writer. Only the machine-code parser
and the pairing function are shared.
"""

from __future__ import annotations

from typing import Sequence

from .encoding import pair
from .machine import decode_machine


def _length(v: int) -> int:
    return v.bit_length()


def _bound0(M: int, x: int, s: int, q: int) -> tuple[int, int]:
    rows = max(s, _length(x) + 2, _length(q))
    return rows, pair(rows + 1, _length(M))


def _as_set(state: int, heads: Sequence[int], tapes: Sequence[list[int]], rows: int) -> set[int]:
    out = set()
    for tau, (head, tape) in enumerate(zip(heads, tapes)):
        for i in range(rows):
            sym = tape[i]
            if sym & 1:
                out.add(pair(i, 3 * tau))
            if sym & 2:
                out.add(pair(i, 3 * tau + 1))
            if i > head:
                out.add(pair(i, 3 * tau + 2))
    j = 0
    while state >> j:
        if (state >> j) & 1:
            out.add(pair(rows, j))
        j += 1
    return out


def simulate(M: int, x: int, t: int, s: int, q: int, oracles: Sequence = ()) -> list[set[int]] | None:
    """Configuration sets ``0..t``, or ``None`` if some step fails."""
    spec = decode_machine(M)
    if spec is None or spec.k != 1 or spec.l != len(oracles):
        return None
    rows, _ = _bound0(M, x, s, q)
    qlen = _length(q)
    T = spec.tapes
    tapes = []
    for tau in range(T):
        tape = [0] * rows
        tape[0] = 3
        if tau == 0:
            for c, ch in enumerate(format(x, "b") if x else "", 1):
                tape[c] = 2 if ch == "1" else 1
        tapes.append(tape)
    heads = [0] * T
    state = 0
    limits = [_length(x) + 2] + [qlen] * spec.l + [s] * spec.w
    out = [_as_set(state, heads, tapes, rows)]
    for _ in range(t):
        if state >= spec.n_states:
            return None
        for tau in range(1, T):
            if heads[tau] >= limits[tau]:
                return None
        seen = tuple(tapes[tau][heads[tau]] for tau in range(T))
        if state in (1, 2):
            new, writes, moves = state, seen, (1,) * T
        elif spec.l and state == 3:
            answer = 0
            for o in range(spec.l):
                tape = tapes[1 + o]
                word = ""
                for c in range(1, min(rows, qlen)):
                    if tape[c] not in (1, 2):
                        break
                    word += "1" if tape[c] == 2 else "0"
                if (int(word, 2) if word else 0) in oracles[o]:
                    answer |= 1 << o
            new, writes, moves = spec.query_targets[answer], seen, (1,) * T
        else:
            new, writes, moves = spec.action(state, seen)
        for tau in range(T):
            tapes[tau][heads[tau]] = writes[tau]
            heads[tau] += moves[tau] - 1
            if heads[tau] < 0 or heads[tau] >= limits[tau]:
                return None
        state = new
        out.append(_as_set(state, heads, tapes, rows))
    return out


def trace_set(M: int, x: int, t: int, s: int, q: int, oracles: Sequence = ()) -> set[int] | None:
    configs = simulate(M, x, t, s, q, oracles)
    if configs is None:
        return None
    return {pair(u, w) for u, conf in enumerate(configs) for w in conf}


def final_state(M: int, x: int, t: int, s: int, q: int, oracles: Sequence = ()) -> int | None:
    configs = simulate(M, x, t, s, q, oracles)
    if configs is None:
        return None
    rows, _ = _bound0(M, x, s, q)
    return sum(1 << j for j in range(_length(M)) if pair(rows, j) in configs[-1])


def trace_bound(M: int, x: int, t: int, s: int, q: int) -> int:
    return pair(t, _bound0(M, x, s, q)[1])


# ------------------------------------------------------------ checkers

def _tt(C, xs) -> set[int]:
    from .circuit import restrict, truth_table
    return set(truth_table(restrict(C, xs), limit=None))


def mu_agrees(claim) -> bool:
    """Every restriction is exactly the halting computation on its input."""
    for x in range(1 << claim.n):
        t, s, q = claim.terms.bounds((x,))
        expect = trace_set(claim.M, x, t, s, q, claim.oracles)
        if expect is None or final_state(claim.M, x, t, s, q, claim.oracles) not in (1, 2):
            return False
        if _tt(claim.circuit, [x]) != expect:
            return False
    return True


def alpha_agrees(claim) -> bool:
    from .circuit import eval_many
    xs = list(range(1 << claim.n))
    got = eval_many(claim.circuit, [(x,) for x in xs])
    for x, g in zip(xs, got):
        t, s, q = claim.terms.bounds((x,))
        if bool(g) != (final_state(claim.M, x, t, s, q, claim.oracles) == 1):
            return False
    return True


def beta_agrees(claim) -> bool:
    for x in range(1 << claim.n):
        t_max, s, q = claim.terms.bounds((x,))
        for t in range(t_max + 1):
            expect = trace_set(claim.M, x, t, s, q, claim.oracles)
            if expect is None:
                return False
            bound = trace_bound(claim.M, x, t, s, q)
            got = {v for v in _tt(claim.circuit, [x, t]) if v < bound}
            if got != expect:
                return False
    return True
