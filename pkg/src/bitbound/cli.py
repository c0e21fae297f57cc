"""Command-line front end.

Every subcommand prints a JSON report (keys sorted) and exits nonzero when
the checked property fails. Timings are left out unless ``--timings`` is
given, so a fixed command line always yields byte-identical output.
"""

from __future__ import annotations

import itertools
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Callable

import click

from . import __version__
from .circuit import (CircuitError, TT_WIDTH_LIMIT, eval_tuple, restrict, truth_ranges)
from .encoding import NatSet
from .formats import (FormatError, MachineFile, dump_bundle, format_circuit, format_machine,
                      load_circuit, load_machine, read_bundle)
from .machine import decode_machine
from .terms import KINDS as TERM_KINDS, TermError, WitnessTerms

MAX_N = 6
MAX_TM = 1 << 12

# property ids reported with each verdict
PROPERTIES = {
    "machine": "machine.code-roundtrip",
    "trace": "trace.computation",
    "mutation": "trace.flip-rejected",
    "witness-terms": "fixtures.witness",
    "schedule": "universal.phase-times",
    "roundtrip": "universal.f-g-roundtrip",
    "wrapper": "wrappers.universality",
    "wrapper-witness": "wrappers.witness",
    "mu": "witness.mu",
    "alpha": "witness.alpha",
    "beta": "witness.beta",
    "pipeline": "witness.cycle-closes",
}

TT_LIST_LIMIT = 1024


class Report:
    """Collects the JSON payload and the exit status of one command."""

    def __init__(self, timings: bool):
        self.timings = timings
        self.start = time.perf_counter()

    def emit(self, payload: dict, ok: bool = True) -> None:
        payload = dict(payload)
        payload.setdefault("ok", ok)
        if self.timings:
            payload["seconds"] = round(time.perf_counter() - self.start, 3)
        click.echo(json.dumps(_jsonable(payload), sort_keys=True, indent=1))
        if not payload["ok"]:
            raise SystemExit(1)


def _jsonable(v: Any) -> Any:
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, NatSet)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "item"):
        return v.item()
    return v


def _report(ctx: click.Context) -> Report:
    return Report(ctx.obj["timings"])


def _machine(ref: str) -> MachineFile:
    try:
        return load_machine(ref)
    except FormatError as exc:
        raise click.UsageError(str(exc)) from None


def _terms(mf: MachineFile, witness: str | None) -> WitnessTerms:
    if witness:
        try:
            if witness.split(None, 1)[0] in TERM_KINDS:
                return WitnessTerms.parse(witness)
            return WitnessTerms.exp(witness)
        except TermError as exc:
            raise click.UsageError(f"--witness: {exc}") from None
    if mf.witness is None:
        raise click.UsageError("machine has no witness terms; pass --witness")
    return mf.witness


def _bounds(mf: MachineFile, x: int, t, s, q, witness) -> tuple[int, int, int]:
    if None in (t, s, q):
        w = _terms(mf, witness).bounds((x,))
        t = w[0] if t is None else t
        s = w[1] if s is None else s
        q = w[2] if q is None else q
    return t, s, q


def _guard_n(ctx: click.Context, n: int) -> None:
    if not 2 <= n <= ctx.obj["max_n"]:
        raise click.UsageError(f"--n must be in 2..{ctx.obj['max_n']} (raise with --max-n)")


def _guard_tm(ctx: click.Context, terms: WitnessTerms, n: int) -> None:
    worst = max(terms.t_M((x,)) for x in range(1 << n))
    if worst > ctx.obj["max_tm"]:
        raise click.UsageError(f"t_M reaches {worst} > {ctx.obj['max_tm']} (raise with --max-tm)")


def _int(text: str) -> int:
    return int(text, 0)


machine_opt = click.option("--machine", "machine_ref", required=True,
                           help="Machine file, fixture name or numeric code.")
witness_opt = click.option("--witness", default=None,
                           help="Witness terms, e.g. 'exp len(x)+3' (default: the machine's).")


def _resource_opts(f):
    f = click.option("--q", type=int, default=None, help="Query bound (default: witness).")(f)
    f = click.option("--s", type=int, default=None, help="Space bound (default: witness).")(f)
    f = click.option("--t", type=int, default=None, help="Time bound (default: witness).")(f)
    return click.option("--x", type=_int_type(), required=True, help="Input.")(f)


def _int_type():
    class IntParam(click.ParamType):
        name = "int"

        def convert(self, value, param, ctx):
            if isinstance(value, int):
                return value
            try:
                return _int(value)
            except ValueError:
                self.fail(f"{value!r} is not an integer", param, ctx)
    return IntParam()


INT = _int_type()


@click.group()
@click.version_option(__version__)
@click.option("--timings", is_flag=True, help="Include wall-clock seconds in reports.")
@click.option("--max-n", type=int, default=MAX_N, show_default=True, help="Largest input length.")
@click.option("--max-tt", type=int, default=TT_WIDTH_LIMIT, show_default=True,
              help="Widest circuit input enumerated by 'circuit tt'.")
@click.option("--max-tm", type=int, default=MAX_TM, show_default=True,
              help="Largest t_M admitted for synthesis.")
@click.pass_context
def main(ctx: click.Context, timings: bool, max_n: int, max_tt: int, max_tm: int) -> None:
    """Step-exact machines, a scheduled universal machine and circuit witnesses."""
    ctx.obj = {"timings": timings, "max_n": max_n, "max_tt": max_tt, "max_tm": max_tm}


# ------------------------------------------------------------------ machine

@main.group()
def machine() -> None:
    """Encode, decode and validate machines; manage the fixture corpus."""


@machine.command("encode")
@click.argument("ref")
@click.pass_context
def machine_encode(ctx, ref):
    mf = _machine(ref)
    code = mf.code
    _report(ctx).emit({"code": code, "hex": f"{code:x}", "bits": code.bit_length(),
                       "property": PROPERTIES["machine"],
                       "roundtrip": decode_machine(code) == mf.spec})


@machine.command("decode")
@click.argument("code", type=INT)
def machine_decode(code):
    spec = decode_machine(code)
    if spec is None:
        raise click.UsageError(f"{code} is not a machine code")
    click.echo(format_machine(spec), nl=False)


@machine.command("validate")
@click.argument("ref")
@click.pass_context
def machine_validate(ctx, ref):
    mf = _machine(ref)
    spec = mf.spec
    payload = {"name": mf.name, "tapes": [spec.k, spec.l, spec.w], "states": spec.n_states,
               "code_bits": mf.code.bit_length(), "witness": None,
               "property": PROPERTIES["witness-terms"]}
    ok = True
    if mf.witness is not None and spec.k == 1:
        from .trace import check_witness, default_samples
        rep = check_witness(mf.code, mf.witness, default_samples(), mf.oracles)
        payload["witness"] = {"terms": mf.witness.describe(), "ok": rep.ok,
                              "checked": rep.checked, "violation": rep.violation,
                              "worst": rep.worst}
        ok = rep.ok
    _report(ctx).emit(payload, ok)


@machine.command("fixtures")
@click.option("--out", type=click.Path(file_okay=False), default=None,
              help="Write every fixture as NAME.tm into this directory.")
@click.pass_context
def machine_fixtures(ctx, out):
    from .fixtures import all_fixtures
    rows = []
    for fx in all_fixtures():
        rows.append({"name": fx.name, "code": f"{fx.code:x}", "witness": fx.witness.describe(),
                     "note": fx.note})
        if out:
            Path(out).mkdir(parents=True, exist_ok=True)
            text = format_machine(fx.spec, fx.witness, fx.oracles)
            (Path(out) / f"{fx.name.lower()}.tm").write_text(f"# {fx.note}\n{text}")
    _report(ctx).emit({"fixtures": rows})


# ------------------------------------------------------------------ trace

@main.group()
def trace() -> None:
    """Run machines and check computations."""


@trace.command("run")
@machine_opt
@_resource_opts
@witness_opt
@click.option("--dump", type=click.Path(dir_okay=False), default=None,
              help="Write the trace set, one element per line.")
@click.pass_context
def trace_run(ctx, machine_ref, x, t, s, q, witness, dump):
    from .trace import Fail, classify, query_of, run, space_of, time_of
    mf = _machine(machine_ref)
    t, s, q = _bounds(mf, x, t, s, q, witness)
    Y = run(mf.code, (x,), t, s, q, mf.oracles)
    if isinstance(Y, Fail):
        _report(ctx).emit({"verdict": "fail", "step": Y.step, "reason": Y.reason,
                           "bounds": [t, s, q]})
        return
    if dump:
        Path(dump).write_text(Y.set.dumps())
    _report(ctx).emit({"verdict": classify(Y), "bounds": [t, s, q], "time": time_of(Y),
                       "space": space_of(Y), "query": query_of(Y), "elements": len(Y.set),
                       "bd": Y.bd})


@trace.command("check")
@machine_opt
@_resource_opts
@witness_opt
@click.option("--set", "set_file", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--literal", is_flag=True, help="Only the four literal conjuncts.")
@click.pass_context
def trace_check(ctx, machine_ref, x, t, s, q, witness, set_file, literal):
    from .trace import context, explain_computation
    mf = _machine(machine_ref)
    t, s, q = _bounds(mf, x, t, s, q, witness)
    try:
        Y = NatSet.loads(Path(set_file).read_text())
    except ValueError as exc:
        raise click.UsageError(f"{set_file}: {exc}") from None
    v = explain_computation(Y, t, context(mf.code, (x,), s, q, mf.oracles), not literal)
    _report(ctx).emit({"property": PROPERTIES["trace"], "conjunct": v.conjunct or None,
                       "index": v.index, "detail": v.detail or None}, v.ok)


@trace.command("mutate")
@machine_opt
@_resource_opts
@witness_opt
@click.pass_context
def trace_mutate(ctx, machine_ref, x, t, s, q, witness):
    from .trace import Fail, mutation_sweep, run
    mf = _machine(machine_ref)
    t, s, q = _bounds(mf, x, t, s, q, witness)
    Y = run(mf.code, (x,), t, s, q, mf.oracles)
    if isinstance(Y, Fail):
        raise click.UsageError(f"run fails at step {Y.step}: {Y.reason}")
    rep = mutation_sweep(Y)
    _report(ctx).emit({"property": PROPERTIES["mutation"], "flips": rep.total,
                       "rejected": rep.rejected, "by_conjunct": rep.by_conjunct,
                       "survivors": rep.survivors}, rep.ok)


# ------------------------------------------------------------------ circuit

@main.group()
def circuit() -> None:
    """Evaluate, restrict, tabulate and compile circuits (hex code files)."""


def _circuit(ref):
    try:
        return load_circuit(ref)
    except FormatError as exc:
        raise click.UsageError(str(exc)) from None


@circuit.command("eval")
@click.argument("circuit_ref")
@click.argument("args", nargs=-1, type=INT)
@click.pass_context
def circuit_eval(ctx, circuit_ref, args):
    """Evaluate on one value per input block."""
    c = _circuit(circuit_ref)
    _report(ctx).emit({"layout": list(c.layout), "args": list(args),
                       "value": eval_tuple(c, args)})


@circuit.command("restrict")
@click.argument("circuit_ref")
@click.argument("args", nargs=-1, type=INT)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def circuit_restrict(ctx, circuit_ref, args, out):
    c = _circuit(circuit_ref)
    try:
        r = restrict(c, args)
    except CircuitError as exc:
        raise click.UsageError(str(exc)) from None
    if out:
        Path(out).write_text(format_circuit(r))
    _report(ctx).emit({"layout": list(r.layout), "size": r.size, "code": f"{r.code():x}",
                       "code_shrinks": r.code() <= c.code()})


@circuit.command("tt")
@click.argument("circuit_ref")
@click.pass_context
def circuit_tt(ctx, circuit_ref):
    """Truth table as inclusive ranges of single-argument inputs.

    Members are listed too when there are at most TT_LIST_LIMIT of them.
    """
    c = _circuit(circuit_ref)
    try:
        ranges = truth_ranges(c, limit=ctx.obj["max_tt"])
    except CircuitError as exc:
        raise click.UsageError(str(exc)) from None
    count = sum(hi - lo for lo, hi in ranges)
    payload = {"width": c.width, "count": count, "ranges": [[lo, hi - 1] for lo, hi in ranges]}
    if count <= TT_LIST_LIMIT:
        payload["members"] = [v for lo, hi in ranges for v in range(lo, hi)]
    _report(ctx).emit(payload)


@circuit.command("show")
@click.argument("circuit_ref")
def circuit_show(circuit_ref):
    click.echo(_circuit(circuit_ref).disassemble())


@circuit.command("compile")
@click.option("--predicate", required=True,
              type=click.Choice(["next", "fail", "start", "accept", "computation"]))
@machine_opt
@click.option("--n", type=int, required=True)
@witness_opt
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def circuit_compile(ctx, predicate, machine_ref, n, witness, out):
    """Compile a step predicate for all inputs of length n."""
    from .synth import compile_computation, compile_predicate
    from .witness import SynthesisError, _family, exp_view
    _guard_n(ctx, n)
    mf = _machine(machine_ref)
    terms = exp_view(_terms(mf, witness))
    _guard_tm(ctx, terms, n)
    try:
        fam = _family(mf.code, terms, n, mf.oracles)
        c = compile_computation(fam) if predicate == "computation" else \
            compile_predicate(predicate, fam)
    except (SynthesisError, CircuitError, ValueError) as exc:
        raise click.UsageError(str(exc)) from None
    if out:
        Path(out).write_text(format_circuit(c))
    _report(ctx).emit({"predicate": predicate, "layout": list(c.layout), "size": c.size,
                       "code_bits": c.code().bit_length()})


# ------------------------------------------------------------------ universal

@main.group()
def universal() -> None:
    """The universal machine: schedule, simulation and trace maps."""


@universal.command("schedule")
@machine_opt
@_resource_opts
@witness_opt
@click.pass_context
def universal_schedule(ctx, machine_ref, x, t, s, q, witness):
    from .universal import schedule
    mf = _machine(machine_ref)
    t, s, q = _bounds(mf, x, t, s, q, witness)
    _report(ctx).emit({"y": [mf.code, x, t, s, q], **schedule(mf.code, (x,), t, s, q).as_dict()})


@universal.command("run")
@machine_opt
@_resource_opts
@witness_opt
@click.option("--detail", type=click.Choice(["rounds", "sweeps"]), default="rounds",
              show_default=True)
@click.pass_context
def universal_run(ctx, machine_ref, x, t, s, q, witness, detail):
    from .universal import SweepAudit, schedule, timing_errors, u_run
    mf = _machine(machine_ref)
    t, s, q = _bounds(mf, x, t, s, q, witness)
    audit = SweepAudit(schedule(mf.code, (x,), t, s, q)) if detail == "sweeps" else None
    Z = u_run(mf.code, (x,), t, s, q, mf.oracles, detail=detail, sink=audit)
    errs = timing_errors(Z)
    if audit is not None and not audit.ok:
        errs.append(f"sweep read times differ in cells {audit.mismatches[:5]}")
    payload = {**Z.summary(), "property": PROPERTIES["schedule"], "timing_errors": errs}
    payload.pop("round_starts")
    if audit is not None:
        payload["audited_cells"] = audit.cells
    _report(ctx).emit(payload, not errs)


@universal.command("roundtrip")
@machine_opt
@_resource_opts
@witness_opt
@click.pass_context
def universal_roundtrip(ctx, machine_ref, x, t, s, q, witness):
    from .trace import Fail, run
    from .universal import UTraceError, f_map, g_map, u_run
    mf = _machine(machine_ref)
    t, s, q = _bounds(mf, x, t, s, q, witness)
    out = {"property": PROPERTIES["roundtrip"]}
    ok = True
    Y = run(mf.code, (x,), t, s, q, mf.oracles)
    if not isinstance(Y, Fail):
        same = g_map(f_map(Y)).set.below(Y.bd) == Y.set.below(Y.bd)
        out["g_of_f"] = same
        ok &= same
    Z = u_run(mf.code, (x,), t, s, q, mf.oracles)
    if Z.accepted:
        try:
            same = f_map(g_map(Z)) == Z
        except UTraceError as exc:
            same = False
            out["error"] = str(exc)
        out["f_of_g"] = same
        ok &= same
    _report(ctx).emit(out, ok)


# ------------------------------------------------------------------ wrappers

@main.group()
def wrap() -> None:
    """The wrapper machines M1, M1*, M2, M2*."""


@wrap.command("run")
@click.argument("kind", type=click.Choice(["m1", "m1star", "m2", "m2star"]))
@click.option("--z", type=INT, default=None, help="Packed input (otherwise built from fields).")
@click.option("--machine", "machine_ref", default=None)
@click.option("--x", type=INT, default=0)
@click.option("--t", type=int, default=None, help="Default: the machine's t_M(x).")
@click.option("--v", type=INT, default=0, help="Queried position (starred forms).")
@click.pass_context
def wrap_run(ctx, kind, z, machine_ref, x, t, v):
    from .wrappers import quintuple, triple, wrapper_run
    oracles = ()
    if z is None:
        if machine_ref is None:
            raise click.UsageError("give --z or --machine")
        mf = _machine(machine_ref)
        oracles = mf.oracles
        if t is None:
            t = _terms(mf, None).t_M((x,))
        z = triple(mf.code, x, t) if kind in ("m1", "m2") else quintuple(mf.code, x, t, v, t)
    r = wrapper_run(kind, z, oracles)
    summary = r.summary()
    summary.pop("u", None)
    _report(ctx).emit({"z": z, **summary})


@wrap.command("witness")
@click.argument("kind", type=click.Choice(["m1", "m1star", "m2", "m2star"]))
@click.option("--samples", type=int, default=64, show_default=True, help="Check z < SAMPLES.")
@click.pass_context
def wrap_witness(ctx, kind, samples):
    from .wrappers import check_wrapper_witness
    rep = check_wrapper_witness(kind, range(samples))
    _report(ctx).emit({"property": PROPERTIES["wrapper-witness"], "checked": rep.checked,
                       "violation": rep.violation, "worst": rep.worst}, rep.ok)


# ------------------------------------------------------------------ witnesses

@main.group()
def witness() -> None:
    """Synthesize, transform and check circuit witnesses (JSON bundles)."""


def _synthesize(ctx, kind, mf: MachineFile, n: int, terms: WitnessTerms):
    from . import witness as W
    _guard_n(ctx, n)
    _guard_tm(ctx, terms, n)
    mu = W.mu_synthesize(mf.code, terms, n, mf.oracles)
    if kind == "mu":
        return mu
    if kind == "alpha":
        return W.alpha_from_mu(mu)
    return W.beta_from_alpha(W.alpha_for_m1star(mu))


@witness.command("synthesize")
@click.option("--kind", type=click.Choice(["mu", "alpha", "beta"]), required=True)
@machine_opt
@click.option("--n", type=int, required=True)
@witness_opt
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Bundle path (default: MACHINE-KIND-nN.json).")
@click.option("--check/--no-check", default=True, show_default=True)
@click.pass_context
def witness_synthesize(ctx, kind, machine_ref, n, witness, out, check):
    from .witness import SynthesisError, check as check_claim, exp_view
    mf = _machine(machine_ref)
    terms = exp_view(_terms(mf, witness))
    try:
        claim = _synthesize(ctx, kind, mf, n, terms)
    except SynthesisError as exc:
        raise click.UsageError(str(exc)) from None
    out = out or f"{mf.name.lower() or 'machine'}-{kind}-n{n}.json"
    dump_bundle(claim, out, mf.name)
    payload = {"bundle": out, **claim.report(), "property": PROPERTIES[kind]}
    ok = True
    if check:
        res = check_claim(claim)
        payload["check"] = res.summary()
        ok = res.ok
    _report(ctx).emit(payload, ok)


def _bundle(path):
    try:
        return read_bundle(path)
    except FormatError as exc:
        raise click.UsageError(str(exc)) from None


@witness.command("check")
@click.argument("bundle", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def witness_check(ctx, bundle):
    from .witness import check as check_claim
    claim = _bundle(bundle)
    res = check_claim(claim)
    _report(ctx).emit({"property": PROPERTIES[claim.kind], **res.summary()}, res.ok)


@witness.command("transform")
@click.argument("bundle", type=click.Path(exists=True, dir_okay=False))
@click.option("--to", "target", type=click.Choice(["alpha", "beta", "mu"]), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.pass_context
def witness_transform(ctx, bundle, target, out):
    """mu -> alpha, mu -> beta (through M1*) and beta -> mu."""
    from . import witness as W
    claim = _bundle(bundle)
    route = (claim.kind, target)
    if route == ("mu", "alpha"):
        new = W.alpha_from_mu(claim)
    elif route == ("mu", "beta"):
        new = W.beta_from_alpha(W.alpha_for_m1star(claim))
    elif route == ("beta", "mu"):
        new = W.mu_from_beta(claim)
    else:
        raise click.UsageError(f"no transform from {claim.kind} to {target}")
    dump_bundle(new, out)
    res = W.check(new)
    _report(ctx).emit({"bundle": out, "property": PROPERTIES[target], **res.summary()}, res.ok)


@witness.command("pipeline")
@machine_opt
@click.option("--n", type=int, required=True)
@witness_opt
@click.option("--transfers/--no-transfers", default=None,
              help="Run the M1 transfer legs (default: when the trace width allows).")
@click.pass_context
def witness_pipeline(ctx, machine_ref, n, witness, transfers):
    from .witness import exp_view, pipeline
    mf = _machine(machine_ref)
    terms = exp_view(_terms(mf, witness))
    _guard_n(ctx, n)
    _guard_tm(ctx, terms, n)
    res = pipeline(mf.code, terms, n, mf.oracles, transfers)
    _report(ctx).emit({"property": PROPERTIES["pipeline"], "checks": res.summary()}, res.ok)


# ------------------------------------------------------------------ suite

@main.group()
def suite() -> None:
    """The acceptance matrix and manifest-driven grids."""


@suite.command("acceptance")
@click.option("--only", default="", help="Comma-separated criterion ids.")
@click.pass_context
def suite_acceptance(ctx, only):
    from .acceptance import run_criteria
    ids = [int(v) for v in only.split(",") if v.strip()] or None
    results = run_criteria(ids, echo=lambda line: click.echo(line, err=True))
    rows = []
    for r in results:
        row = {"id": r.id, "name": r.name, "ok": r.ok, **r.detail}
        if ctx.obj["timings"]:
            row["seconds"] = round(r.seconds, 2)
        rows.append(row)
    _report(ctx).emit({"criteria": rows}, all(r.ok for r in results))


def _cell_trace(cell: dict) -> dict:
    from .trace import Fail, classify, explain_computation, run
    mf = load_machine(cell["machine"])
    x = cell["x"]
    t, s, q = _bounds(mf, x, cell.get("t"), cell.get("s"), cell.get("q"), cell.get("witness"))
    Y = run(mf.code, (x,), t, s, q, mf.oracles)
    if isinstance(Y, Fail):
        return {"ok": True, "verdict": "fail", "reason": Y.reason}
    v = explain_computation(Y.set, t, Y.ctx)
    return {"ok": v.ok, "verdict": classify(Y), "property": PROPERTIES["trace"]}


def _cell_schedule(cell: dict) -> dict:
    from .universal import timing_errors, u_run
    mf = load_machine(cell["machine"])
    x = cell["x"]
    t, s, q = _bounds(mf, x, cell.get("t"), cell.get("s"), cell.get("q"), cell.get("witness"))
    Z = u_run(mf.code, (x,), t, s, q, mf.oracles)
    errs = timing_errors(Z)
    return {"ok": not errs, "verdict": Z.verdict, "time": Z.end_time, "errors": errs,
            "property": PROPERTIES["schedule"]}


def _cell_witness(cell: dict) -> dict:
    from .trace import check_witness
    mf = load_machine(cell["machine"])
    rep = check_witness(mf.code, _terms(mf, cell.get("witness")), [(cell["x"],)], mf.oracles)
    return {"ok": rep.ok, "violation": rep.violation, "property": PROPERTIES["witness-terms"]}


def _cell_wrapper(cell: dict) -> dict:
    from .wrappers import wrapper_run
    r = wrapper_run(cell["kind"], cell["z"])
    return {"ok": True, "verdict": r.verdict, "time": r.time, "space": r.space}


def _cell_pipeline(cell: dict) -> dict:
    from .witness import exp_view, pipeline
    mf = load_machine(cell["machine"])
    res = pipeline(mf.code, exp_view(_terms(mf, cell.get("witness"))), cell["n"], mf.oracles,
                   cell.get("transfers"))
    return {"ok": res.ok, "checks": res.summary(), "property": PROPERTIES["pipeline"]}


CELL_RUNNERS: dict[str, Callable[[dict], dict]] = {
    "trace": _cell_trace,
    "schedule": _cell_schedule,
    "witness-terms": _cell_witness,
    "wrapper": _cell_wrapper,
    "pipeline": _cell_pipeline,
}


def _run_cell(args: tuple[str, dict]) -> dict:
    command, cell = args
    try:
        return CELL_RUNNERS[command](cell)
    except (FormatError, click.UsageError, ValueError) as exc:
        return {"ok": False, "error": str(exc)}


def expand_grid(grid: dict) -> list[dict]:
    """Cartesian product of the list-valued entries; scalars are shared."""
    keys = sorted(grid)
    axes = [grid[k] if isinstance(grid[k], list) else [grid[k]] for k in keys]
    return [dict(zip(keys, combo)) for combo in itertools.product(*axes)]


def dispatch(manifest: dict, workers: int = 1) -> dict:
    """Run a manifest's grid and return the report (cases sorted by key)."""
    command = manifest.get("command")
    if command not in CELL_RUNNERS:
        raise click.UsageError(f"unknown manifest command {command!r}; "
                               f"expected one of {sorted(CELL_RUNNERS)}")
    cells = expand_grid(manifest.get("grid", {}))
    for path in manifest.get("inputs", []):
        if not Path(path).is_file():
            raise click.UsageError(f"manifest input {path} does not exist")
    jobs = [(command, cell) for cell in cells]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell, jobs))
    else:
        results = [_run_cell(j) for j in jobs]
    cases = sorted(({"case": json.dumps(c, sort_keys=True), **r} for c, r in zip(cells, results)),
                   key=lambda row: row["case"])
    return {"command": command, "seed": manifest.get("seed", 0), "cases": cases,
            "failed": sum(not c["ok"] for c in cases), "ok": all(c["ok"] for c in cases)}


@suite.command("run")
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def suite_run(ctx, manifest):
    """Execute a JSON manifest: {command, grid, inputs, seed, output}."""
    from .witness import _workers
    try:
        data = json.loads(Path(manifest).read_text())
    except json.JSONDecodeError as exc:
        raise click.UsageError(f"{manifest}:{exc.lineno}: {exc.msg}") from None
    report = dispatch(data, _workers())
    if data.get("output"):
        outdir = Path(data["output"])
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "report.json").write_text(json.dumps(_jsonable(report), sort_keys=True,
                                                        indent=1) + "\n")
    _report(ctx).emit(report, report["ok"])


if __name__ == "__main__":
    sys.exit(main())
