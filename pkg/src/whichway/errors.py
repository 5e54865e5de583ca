"""Exception types shared by the engines, the parser and the CLI."""
from __future__ import annotations

from dataclasses import dataclass


class WhichwayError(Exception):
    """Base class for every structured error raised by this package."""


@dataclass(frozen=True)
class Issue:
    """One invariant violation found while validating a graph."""

    code: str
    message: str
    element: str | None = None
    line: int | None = None

    def __str__(self) -> str:
        where = f"line {self.line}: " if self.line is not None else ""
        return f"{where}{self.code}: {self.message}"


class GraphError(WhichwayError, ValueError):
    """A graph failed validation; ``issues`` lists every violation."""

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(str(i) for i in self.issues) or "invalid graph")

    @property
    def codes(self) -> set[str]:
        return {i.code for i in self.issues}


InvalidGraph = GraphError


@dataclass(frozen=True)
class Diagnostic:
    line: int
    col: int
    code: str
    message: str
    expected: str | None = None

    def __str__(self) -> str:
        tail = f" (expected {self.expected})" if self.expected else ""
        return f"{self.line}:{self.col}: {self.code}: {self.message}{tail}"


class ParseError(WhichwayError, ValueError):
    """Experiment text could not be parsed; ``diagnostics`` are line/column anchored."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class ZeroProbabilityCondition(WhichwayError, ValueError):
    pass


class UnknownStation(WhichwayError, KeyError):
    pass


class DimensionMismatch(WhichwayError, ValueError):
    pass


class BadCoefficients(WhichwayError, ValueError):
    pass


class BadParams(WhichwayError, ValueError):
    pass


class IncompleteBasis(WhichwayError, ValueError):
    pass


class OrderMismatch(WhichwayError, ValueError):
    pass


class NoBornRealization(WhichwayError, ValueError):
    """The graph cannot be mapped onto per-station projective measurements of source qubits."""
