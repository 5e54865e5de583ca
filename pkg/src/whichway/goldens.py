"""Golden probability tables for the built-in scenarios.

Each case stores a closed-form expression (a restricted Python expression
over the scenario parameters), the expected probability as a double, and a
provenance tag.  :func:`evaluate_golden` checks the expression, the path
engine and the Born engine against the stored value.

Names usable in expressions: the scenario parameters, ``v = sqrt(1-u^2)``
(triangle), ``T1 = 1-R1`` and ``T2 = 1-R2`` (figure1), ``pi``, and the
functions ``exp``, ``sqrt``, ``abs``.  ``1j`` is the imaginary unit.
"""
from __future__ import annotations

import ast
import cmath
import json
import math
import operator
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .probability import joint_distribution
from .scenarios import build
from .statevector import born_distribution

PROVENANCES = ("PAPER", "DERIVED", "TRIVIAL")
DEFAULT_TOL = 1e-9

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}


def _sqrt(x):
    return cmath.sqrt(x) if isinstance(x, complex) or x < 0 else math.sqrt(x)


_FUNCS = {"exp": cmath.exp, "sqrt": _sqrt, "abs": abs}


def derived_names(params: dict) -> dict:
    names = dict(params)
    if "u" in params:
        names["v"] = math.sqrt(1 - params["u"] ** 2)
    for k in ("R1", "R2"):
        if k in params:
            names["T" + k[1:]] = 1 - params[k]
    names["pi"] = math.pi
    return names


def evaluate_expression(expr: str, params: dict) -> float:
    """Evaluate a golden expression; only arithmetic, names and whitelisted calls are allowed."""
    names = derived_names(params)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
            return node.value
        if isinstance(node, ast.Name):
            if node.id not in names:
                raise ValueError(f"unknown name {node.id!r} in {expr!r}")
            return names[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand))
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS and not node.keywords:
            return _FUNCS[node.func.id](*[ev(a) for a in node.args])
        raise ValueError(f"unsupported syntax in {expr!r}: {ast.dump(node)}")

    value = ev(ast.parse(expr, mode="eval"))
    if isinstance(value, complex):
        if abs(value.imag) > 1e-12:
            raise ValueError(f"{expr!r} is not real: {value!r}")
        value = value.real
    return float(value)


@dataclass(frozen=True)
class GoldenCase:
    id: str
    scenario: str
    params: dict
    outcome: dict
    expression: str
    expected: float
    provenance: str
    note: str = ""

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"{self.id}: provenance {self.provenance!r} not in {PROVENANCES}")

    @classmethod
    def from_json(cls, obj: dict) -> "GoldenCase":
        return cls(obj["id"], obj["scenario"], dict(obj["params"]), dict(obj["outcome"]), obj["expression"],
                   float(obj["expected"]), obj["provenance"], obj.get("note", ""))

    def to_json(self) -> dict:
        return {"id": self.id, "scenario": self.scenario, "params": self.params, "outcome": self.outcome,
                "expression": self.expression, "expected": self.expected, "provenance": self.provenance,
                "note": self.note}


@dataclass(frozen=True)
class GoldenResult:
    case: GoldenCase
    p_expression: float
    p_paths: float
    p_born: float
    tol: float = DEFAULT_TOL
    errors: tuple[str, ...] = field(default=())

    @property
    def residual(self) -> float:
        e = self.case.expected
        return max(abs(self.p_expression - e), abs(self.p_paths - e), abs(self.p_born - e))

    @property
    def passed(self) -> bool:
        return not self.errors and self.residual <= self.tol


def default_path() -> Path:
    return Path(str(resources.files("whichway") / "data" / "goldens.jsonl"))


def load_goldens(path=None) -> list[GoldenCase]:
    text = Path(path or default_path()).read_text(encoding="utf-8")
    return [GoldenCase.from_json(json.loads(line)) for line in text.splitlines() if line.strip()]


def dump_goldens(cases, path) -> None:
    lines = [json.dumps(c.to_json(), sort_keys=True) for c in cases]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def evaluate_golden(case: GoldenCase, tol: float = DEFAULT_TOL) -> GoldenResult:
    """Compare expression, path engine and Born engine with the stored value.

    Failures are reported in the result, never raised.
    """
    nan = float("nan")
    try:
        p_expr = evaluate_expression(case.expression, case.params)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        return GoldenResult(case, nan, nan, nan, tol, (f"expression: {exc}",))
    try:
        graph = build(case.scenario, **case.params)
        p_paths = joint_distribution(graph)[case.outcome]
        p_born = born_distribution(graph)[case.outcome]
    except Exception as exc:  # recorded, not raised
        return GoldenResult(case, p_expr, nan, nan, tol, (f"{type(exc).__name__}: {exc}",))
    return GoldenResult(case, p_expr, p_paths, p_born, tol)


def evaluate_all(cases=None, tol: float = DEFAULT_TOL) -> list[GoldenResult]:
    return [evaluate_golden(c, tol) for c in (load_goldens() if cases is None else cases)]
