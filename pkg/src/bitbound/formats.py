"""Text and JSON file formats.

Machine file (one item per line, ``#`` starts a comment)::

    tapes 1 0 1          # input, oracle, work tapes
    states 3
    witness exp len(x)+3 # optional
    queries 2 1          # query targets by answer, oracle machines only
    oracle 1 2 3 5       # members of each oracle set, one line per tape
    0 >> 0 >> RR         # state scanned -> new-state writes moves

Symbols are ``_01>`` (blank, 0, 1, end marker) and moves ``LSR``. Missing
transitions go to the rejecting state without moving.

Circuit file: the code in hex on the first non-comment line, optionally
followed by a ``#``-commented disassembly.

Witness bundle: a JSON envelope holding the machine, its terms, the length,
the claim kind and the circuit code in hex.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .circuit import Circuit, CircuitError, decode
from .encoding import NatSet
from .fixtures import by_name
from .machine import (MOVE_CHARS, SYMBOL_CHARS, MachineError, MachineSpec, decode_machine,
                      encode_machine)
from .terms import TermError, WitnessTerms

BUNDLE_FORMAT = "bitbound-witness/1"


class FormatError(ValueError):
    """A parse error; ``str()`` starts with ``file:line``."""

    def __init__(self, where: str, line: int | None, message: str):
        loc = f"{where}:{line}" if line is not None else where
        super().__init__(f"{loc}: {message}")


@dataclass(frozen=True)
class MachineFile:
    spec: MachineSpec
    witness: WitnessTerms | None = None
    oracles: tuple[NatSet, ...] = ()
    name: str = ""

    @property
    def code(self) -> int:
        return encode_machine(self.spec)


def _symbols(text: str, T: int, where: str, lineno: int, alphabet: str, what: str) -> tuple[int, ...]:
    if len(text) != T or any(ch not in alphabet for ch in text):
        raise FormatError(where, lineno, f"expected {T} {what} from {alphabet!r}, got {text!r}")
    return tuple(alphabet.index(ch) for ch in text)


def parse_machine(text: str, where: str = "<machine>") -> MachineFile:
    tapes = states = None
    witness = None
    queries: tuple[int, ...] = ()
    oracles: list[NatSet] = []
    rows: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if head == "tapes":
                k, l, w = (int(v) for v in rest.split())
                tapes = (k, l, w)
            elif head == "states":
                states = int(rest)
            elif head == "witness":
                witness = WitnessTerms.parse(rest)
            elif head == "queries":
                queries = tuple(int(v) for v in rest.split())
            elif head == "oracle":
                oracles.append(NatSet(int(v) for v in rest.split()))
            else:
                rows.append((lineno, line.split()))
        except (ValueError, TermError) as exc:
            raise FormatError(where, lineno, str(exc)) from None
    if tapes is None or states is None:
        raise FormatError(where, None, "missing 'tapes' or 'states' line")
    T = sum(tapes)
    table = {}
    for lineno, fields in rows:
        if len(fields) != 5:
            raise FormatError(where, lineno, "transition needs: state scanned new writes moves")
        try:
            st, new = int(fields[0]), int(fields[2])
        except ValueError:
            raise FormatError(where, lineno, "states must be numbers") from None
        scanned = _symbols(fields[1], T, where, lineno, SYMBOL_CHARS, "symbols")
        writes = _symbols(fields[3], T, where, lineno, SYMBOL_CHARS, "symbols")
        moves = _symbols(fields[4], T, where, lineno, MOVE_CHARS, "moves")
        if (st, scanned) in table:
            raise FormatError(where, lineno, f"duplicate transition for state {st} on {fields[1]}")
        table[(st, scanned)] = (new, writes, moves)
    try:
        spec = MachineSpec.build(*tapes, states, table, queries)
        spec.validate()
    except MachineError as exc:
        raise FormatError(where, None, str(exc)) from None
    if len(oracles) not in (0, spec.l):
        raise FormatError(where, None, f"{spec.l} oracle tapes but {len(oracles)} oracle lines")
    if spec.l and not oracles:
        oracles = [NatSet()] * spec.l
    return MachineFile(spec, witness, tuple(oracles), Path(where).stem)


def format_machine(spec: MachineSpec, witness: WitnessTerms | None = None,
                   oracles: tuple[NatSet, ...] = ()) -> str:
    lines = [f"tapes {spec.k} {spec.l} {spec.w}", f"states {spec.n_states}"]
    if witness is not None:
        lines.append(f"witness {witness.describe()}")
    if spec.query_targets:
        lines.append("queries " + " ".join(map(str, spec.query_targets)))
    for o in oracles:
        lines.append("oracle " + " ".join(map(str, o)))
    for (st, scanned), (new, writes, moves) in spec.table:
        lines.append(" ".join([str(st), "".join(SYMBOL_CHARS[a] for a in scanned), str(new),
                               "".join(SYMBOL_CHARS[a] for a in writes),
                               "".join(MOVE_CHARS[d] for d in moves)]))
    return "\n".join(lines) + "\n"


def load_machine(ref: str) -> MachineFile:
    """A machine file path, a fixture name, or a machine code (decimal or 0x hex)."""
    path = Path(ref)
    if path.is_file():
        return parse_machine(path.read_text(), str(path))
    try:
        fx = by_name(ref)
        return MachineFile(fx.spec, fx.witness, fx.oracles, fx.name)
    except KeyError:
        pass
    try:
        code = int(ref, 0)
    except ValueError:
        raise FormatError(ref, None, "not a file, fixture name or machine code") from None
    spec = decode_machine(code)
    if spec is None:
        raise FormatError(ref, None, "number is not a machine code")
    return MachineFile(spec, None, (), f"code{code:x}")


# ------------------------------------------------------------- circuits

def format_circuit(c: Circuit, listing: bool = False) -> str:
    out = f"{c.code():x}\n"
    if listing:
        out += "".join(f"# {line}\n" for line in c.disassemble().splitlines())
    return out


def parse_circuit(text: str, where: str = "<circuit>") -> Circuit:
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            code = int(line, 16)
        except ValueError:
            raise FormatError(where, lineno, "expected a hex circuit code") from None
        c = decode(code)
        if c is None:
            raise FormatError(where, lineno, "number is not a circuit code")
        return c
    raise FormatError(where, None, "empty circuit file")


def load_circuit(ref: str) -> Circuit:
    path = Path(ref)
    if path.is_file():
        return parse_circuit(path.read_text(), str(path))
    return parse_circuit(ref, "<argument>")


# ------------------------------------------------------------- witnesses

def bundle(claim, machine_name: str = "") -> dict:
    """JSON envelope for a witness claim."""
    return {
        "format": BUNDLE_FORMAT,
        "kind": claim.kind,
        "machine": {"name": machine_name, "code": f"{claim.M:x}"},
        "terms": claim.terms.describe(),
        "n": claim.n,
        "c": claim.exponent,
        "oracles": [list(o) for o in claim.oracles],
        "circuit": f"{claim.circuit.code():x}",
        "report": claim.report(),
    }


def dump_bundle(claim, path: str | Path, machine_name: str = "") -> None:
    Path(path).write_text(json.dumps(bundle(claim, machine_name), sort_keys=True, indent=1) + "\n")


def read_bundle(path: str | Path):
    from .witness import WitnessClaim
    where = str(path)
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(where, exc.lineno, exc.msg) from None
    if data.get("format") != BUNDLE_FORMAT:
        raise FormatError(where, None, f"not a {BUNDLE_FORMAT} bundle")
    try:
        circuit = decode(int(data["circuit"], 16))
        if circuit is None:
            raise FormatError(where, None, "circuit field is not a circuit code")
        return WitnessClaim(data["kind"], int(data["machine"]["code"], 16),
                            WitnessTerms.parse(data["terms"]), int(data["n"]), circuit,
                            tuple(NatSet(o) for o in data.get("oracles", [])),
                            data.get("c"))
    except (KeyError, ValueError, TermError, CircuitError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(where, None, f"bad bundle field: {exc}") from None
