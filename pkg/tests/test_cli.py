import json

import pytest
from click.testing import CliRunner

from bitbound.circuit import and2_single
from bitbound.cli import dispatch, expand_grid, main
from bitbound.fixtures import by_name


@pytest.fixture
def cli():
    runner = CliRunner()

    def invoke(*args, code=0):
        result = runner.invoke(main, [str(a) for a in args], catch_exceptions=False)
        assert result.exit_code == code, result.output
        return result
    return invoke


def _json(result):
    return json.loads(result.stdout)


def test_machine_encode_and_decode(cli):
    fx = by_name("PARITY")
    out = _json(cli("machine", "encode", "PARITY"))
    assert out["code"] == fx.code and out["roundtrip"]
    text = cli("machine", "decode", hex(fx.code)).stdout
    assert text.startswith("tapes 1 0 0")


def test_machine_decode_non_code(cli):
    assert "not a machine code" in cli("machine", "decode", "0", code=2).output


def test_fixture_export_then_validate(cli, tmp_path):
    rows = _json(cli("machine", "fixtures", "--out", tmp_path))["fixtures"]
    assert {r["name"] for r in rows} >= {"PARITY", "COPY", "ORACLE", "COUNTER"}
    out = _json(cli("machine", "validate", tmp_path / "parity.tm"))
    assert out["ok"] and out["witness"]["ok"]


def test_trace_run_dump_and_check(cli, tmp_path):
    dump = tmp_path / "y.txt"
    out = _json(cli("trace", "run", "--machine", "PARITY", "--x", 7, "--dump", dump))
    assert out["verdict"] == "accepting"
    t, s, q = out["bounds"]
    ok = _json(cli("trace", "check", "--machine", "PARITY", "--x", 7, "--t", t, "--s", s,
                   "--q", q, "--set", dump))
    assert ok["ok"]
    bad = cli("trace", "check", "--machine", "PARITY", "--x", 5, "--t", t, "--s", s, "--q", q,
              "--set", dump, code=1)
    assert _json(bad)["conjunct"] == "start"


def test_trace_run_reports_failures(cli):
    out = _json(cli("trace", "run", "--machine", "COPY", "--x", 13, "--t", 10, "--s", 2,
                    "--q", 1))
    assert out["verdict"] == "fail"


def test_trace_mutate(cli):
    out = _json(cli("trace", "mutate", "--machine", "LOOP_2", "--x", 1))
    assert out["ok"] and out["rejected"] == out["flips"]


def test_circuit_commands(cli, tmp_path):
    hexcode = f"{and2_single().code():x}"
    assert _json(cli("circuit", "eval", hexcode, 3))["value"] == 1
    assert _json(cli("circuit", "eval", hexcode, 4))["value"] == 0
    assert _json(cli("circuit", "tt", hexcode))["members"] == [3]
    assert "AND" in cli("circuit", "show", hexcode).stdout


def test_circuit_compile_and_restrict(cli, tmp_path):
    path = tmp_path / "start.circ"
    cli("circuit", "compile", "--predicate", "start", "--machine", "PARITY", "--n", 2,
        "--out", path)
    restricted = tmp_path / "r.circ"
    cli("circuit", "restrict", path, 3, "--out", restricted)
    members = _json(cli("circuit", "tt", restricted))["members"]
    assert members


def test_universal_commands(cli):
    sch = _json(cli("universal", "schedule", "--machine", "PARITY", "--x", 5, "--t", 12,
                    "--s", 4, "--q", 1))
    out = _json(cli("universal", "run", "--machine", "PARITY", "--x", 5, "--t", 12, "--s", 4,
                    "--q", 1))
    assert out["time"] == sch["t5"]
    assert _json(cli("universal", "roundtrip", "--machine", "LOOP_2", "--x", 3))["ok"]


def test_wrap_commands(cli):
    out = _json(cli("wrap", "run", "m1", "--machine", "PARITY", "--x", 7, "--t", 12))
    assert out["verdict"] == "accept"
    assert _json(cli("wrap", "witness", "m1", "--samples", 16))["ok"]


def test_witness_synthesize_transform_check(cli, tmp_path):
    mu = tmp_path / "mu.json"
    alpha = tmp_path / "alpha.json"
    assert _json(cli("witness", "synthesize", "--kind", "mu", "--machine", "PARITY", "--n", 2,
                     "--out", mu))["ok"]
    cli("witness", "transform", mu, "--to", "alpha", "--out", alpha)
    assert _json(cli("witness", "check", alpha))["ok"]


def test_guards_refuse_oversized_requests(cli):
    res = cli("witness", "synthesize", "--kind", "mu", "--machine", "PARITY", "--n", 9, code=2)
    assert "--max-n" in res.output
    res = cli("--max-tm", 2, "witness", "synthesize", "--kind", "mu", "--machine", "PARITY",
              "--n", 2, code=2)
    assert "--max-tm" in res.output


def test_unknown_machine_is_a_usage_error(cli):
    assert "not a file" in cli("machine", "encode", "nothing-here", code=2).output


def test_expand_grid():
    cells = expand_grid({"machine": "PARITY", "x": [1, 2], "t": [3, 4]})
    assert len(cells) == 4 and all(c["machine"] == "PARITY" for c in cells)


def test_manifest_run_is_deterministic(cli, tmp_path):
    manifest = {"command": "trace", "grid": {"machine": ["PARITY", "COPY"], "x": [0, 3, 6]},
                "seed": 0, "output": str(tmp_path / "out")}
    path = tmp_path / "m.json"
    path.write_text(json.dumps(manifest))
    first = cli("suite", "run", path).stdout
    second = cli("suite", "run", path).stdout
    assert first == second
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["ok"] and len(report["cases"]) == 6
    assert report == dispatch(manifest, workers=2)


def test_manifest_unknown_command(cli, tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"command": "nope"}))
    assert "unknown manifest command" in cli("suite", "run", path, code=2).output


def test_suite_acceptance_single_criterion(cli):
    out = _json(cli("suite", "acceptance", "--only", "8"))
    assert out["ok"] and out["criteria"][0]["id"] == 8
