import json

import pytest

from bitbound.circuit import and2, decode
from bitbound.fixtures import all_fixtures, by_name
from bitbound.formats import (FormatError, format_circuit, format_machine, load_circuit,
                              load_machine, parse_circuit, parse_machine, read_bundle,
                              dump_bundle)
from bitbound.witness import mu_synthesize


@pytest.mark.parametrize("fx", all_fixtures(), ids=lambda f: f.name)
def test_machine_file_round_trip(fx):
    text = format_machine(fx.spec, fx.witness, fx.oracles)
    back = parse_machine(text)
    assert back.code == fx.code
    assert back.witness.describe() == fx.witness.describe()
    assert back.oracles == tuple(fx.oracles)


def test_load_machine_accepts_names_codes_and_paths(tmp_path):
    fx = by_name("PARITY")
    path = tmp_path / "parity.tm"
    path.write_text(format_machine(fx.spec))
    assert load_machine("PARITY").code == fx.code
    assert load_machine(str(fx.code)).code == fx.code
    assert load_machine(hex(fx.code)).code == fx.code
    loaded = load_machine(str(path))
    assert loaded.code == fx.code and loaded.name == "parity"


def test_errors_name_file_and_line(tmp_path):
    path = tmp_path / "bad.tm"
    path.write_text("tapes 1 0 0\nstates 3\n# ok\n0 >> 1 > R\n")
    with pytest.raises(FormatError, match=r"bad\.tm:4:"):
        parse_machine(path.read_text(), str(path))


@pytest.mark.parametrize("text,fragment", [
    ("states 3\n", "missing"),
    ("tapes 1 0 0\nstates 3\n0 > 1 > R\n0 > 2 > R\n", ":4: duplicate"),
    ("tapes 1 0 0\nstates x\n", ":2:"),
    ("tapes 1 0 0\nstates 3\n0 ? 1 > R\n", ":3:"),
    ("tapes 1 0 0\nstates 3\nwitness exp len(\n", ":3:"),
])
def test_malformed_machine_files(text, fragment):
    with pytest.raises(FormatError) as info:
        parse_machine(text, "m.tm")
    assert fragment in str(info.value)


def test_load_machine_rejects_unknown_references():
    with pytest.raises(FormatError):
        load_machine("no-such-machine")
    with pytest.raises(FormatError):
        load_machine("0")


def test_circuit_file_round_trip(tmp_path):
    c = and2()
    text = format_circuit(c, listing=True)
    assert text.startswith(f"{c.code():x}\n#")
    assert parse_circuit(text) == c
    path = tmp_path / "and.circ"
    path.write_text(text)
    assert load_circuit(str(path)) == c
    assert load_circuit(f"{c.code():x}") == c


def test_circuit_file_errors():
    with pytest.raises(FormatError, match=":2:"):
        parse_circuit("# header\nzz\n", "c.circ")
    with pytest.raises(FormatError, match="empty"):
        parse_circuit("# nothing\n", "c.circ")
    with pytest.raises(FormatError, match="not a circuit"):
        parse_circuit("0\n")


def test_witness_bundle_round_trip(tmp_path):
    fx = by_name("PARITY")
    claim = mu_synthesize(fx.code, fx.witness, 2)
    path = tmp_path / "w.json"
    dump_bundle(claim, path, fx.name)
    data = json.loads(path.read_text())
    assert data["format"] == "bitbound-witness/1" and data["kind"] == "mu"
    back = read_bundle(path)
    assert back.circuit == claim.circuit and back.M == claim.M and back.n == 2
    assert decode(int(data["circuit"], 16)) == claim.circuit


def test_bundle_errors(tmp_path):
    path = tmp_path / "w.json"
    path.write_text("{\n  \"format\": 1,\n")
    with pytest.raises(FormatError, match=r"w\.json:3"):
        read_bundle(path)
    path.write_text(json.dumps({"format": "other"}))
    with pytest.raises(FormatError, match="not a"):
        read_bundle(path)
    path.write_text(json.dumps({"format": "bitbound-witness/1", "kind": "mu"}))
    with pytest.raises(FormatError, match="bad bundle field"):
        read_bundle(path)

