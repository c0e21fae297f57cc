"""Witness terms: small arithmetic expressions over the machine inputs.

Expressions use ``x`` (first input) or ``x1, x2, ...``, integer literals,
``+ - * // % **`` and the functions ``len`` (binary length), ``max``,
``min``. They are parsed once with :mod:`ast` and evaluated exactly.
"""

from __future__ import annotations

import ast
import operator
from dataclasses import dataclass
from typing import Sequence

from .encoding import bitlen

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: lambda a, b: max(a - b, 0),
    ast.Mult: operator.mul,
    ast.FloorDiv: operator.floordiv,
    ast.Mod: operator.mod,
    ast.Pow: operator.pow,
}
_FUNCS = {"len": bitlen, "max": max, "min": min}


class TermError(ValueError):
    pass


@dataclass(frozen=True)
class Term:
    source: str

    def __post_init__(self):
        try:
            tree = ast.parse(self.source, mode="eval")
        except SyntaxError as exc:
            raise TermError(f"cannot parse term {self.source!r}: {exc.msg}") from None
        _check(tree.body)
        object.__setattr__(self, "_tree", tree.body)

    def __call__(self, inputs: Sequence[int]) -> int:
        env = {f"x{i + 1}": v for i, v in enumerate(inputs)}
        if inputs:
            env["x"] = inputs[0]
        return _eval(self._tree, env)

    def __str__(self) -> str:
        return self.source


def _check(node: ast.AST) -> None:
    if isinstance(node, ast.BinOp):
        if type(node.op) not in _BINOPS:
            raise TermError(f"operator {type(node.op).__name__} not allowed")
        _check(node.left)
        _check(node.right)
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS or node.keywords:
            raise TermError("only len/max/min calls are allowed")
        for a in node.args:
            _check(a)
    elif isinstance(node, ast.Name):
        if not (node.id == "x" or (node.id[0] == "x" and node.id[1:].isdigit())):
            raise TermError(f"unknown variable {node.id!r}")
    elif isinstance(node, ast.Constant):
        if not isinstance(node.value, int) or node.value < 0:
            raise TermError("only natural literals are allowed")
    else:
        raise TermError(f"unsupported syntax: {type(node).__name__}")


def _eval(node: ast.AST, env: dict) -> int:
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](_eval(node.left, env), _eval(node.right, env))
    if isinstance(node, ast.Call):
        return _FUNCS[node.func.id](*(_eval(a, env) for a in node.args))
    if isinstance(node, ast.Name):
        if node.id not in env:
            raise TermError(f"variable {node.id} not bound")
        return env[node.id]
    return node.value


KINDS = ("exp", "pspace", "p", "general")


@dataclass(frozen=True)
class WitnessTerms:
    """Resource terms of an explicit machine.

    Single-term kinds derive ``(t0, s0, q0)`` from ``t_M``:
    exp ``(t_M, t_M, t_M)``, pspace ``(t_M, |t_M|, t_M)``,
    p ``(|t_M|, |t_M|, t_M)``. Kind ``general`` carries all three.
    """

    kind: str
    t_m: Term | None = None
    t0_term: Term | None = None
    s0_term: Term | None = None
    q0_term: Term | None = None

    @staticmethod
    def exp(t_m: str) -> "WitnessTerms":
        return WitnessTerms("exp", Term(t_m))

    @staticmethod
    def pspace(t_m: str) -> "WitnessTerms":
        return WitnessTerms("pspace", Term(t_m))

    @staticmethod
    def poly(t_m: str) -> "WitnessTerms":
        return WitnessTerms("p", Term(t_m))

    @staticmethod
    def general(t0: str, s0: str, q0: str) -> "WitnessTerms":
        return WitnessTerms("general", None, Term(t0), Term(s0), Term(q0))

    def __post_init__(self):
        if self.kind not in KINDS:
            raise TermError(f"unknown witness kind {self.kind!r}")
        if self.kind == "general":
            if None in (self.t0_term, self.s0_term, self.q0_term):
                raise TermError("general witness needs t0, s0 and q0")
        elif self.t_m is None:
            raise TermError(f"{self.kind} witness needs t_M")

    def t_M(self, inputs: Sequence[int]) -> int:
        if self.t_m is None:
            return self.t0(inputs)
        return self.t_m(inputs)

    def t0(self, inputs):
        if self.kind == "general":
            return self.t0_term(inputs)
        v = self.t_m(inputs)
        return bitlen(v) if self.kind == "p" else v

    def s0(self, inputs):
        if self.kind == "general":
            return self.s0_term(inputs)
        v = self.t_m(inputs)
        return v if self.kind == "exp" else bitlen(v)

    def q0(self, inputs):
        if self.kind == "general":
            return self.q0_term(inputs)
        return self.t_m(inputs)

    def bounds(self, inputs: Sequence[int]) -> tuple[int, int, int]:
        """The witnessed ``(t, s, q)`` the machine is simulated against."""
        return self.t0(inputs), self.s0(inputs), self.q0(inputs)

    def describe(self) -> str:
        if self.kind == "general":
            return f"general t0={self.t0_term} s0={self.s0_term} q0={self.q0_term}"
        return f"{self.kind} {self.t_m}"

    @staticmethod
    def parse(text: str) -> "WitnessTerms":
        parts = text.split(None, 1)
        if not parts:
            raise TermError("empty witness line")
        kind = parts[0]
        rest = parts[1] if len(parts) > 1 else ""
        if kind == "general":
            fields = dict(item.split("=", 1) for item in rest.split())
            try:
                return WitnessTerms.general(fields["t0"], fields["s0"], fields["q0"])
            except KeyError as exc:
                raise TermError(f"general witness missing {exc.args[0]}") from None
        return WitnessTerms(kind, Term(rest.strip()))
