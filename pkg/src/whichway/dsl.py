"""Line-oriented text format for experiments (``.oxp`` files).

One statement per line; ``#`` starts a comment::

    format 1
    source s amp 0.7071067811865476 0.7071067811865476
    bs bs1 R 0.5
    phase alpha 1.5707963267948966
    mirror m1
    shg x00
    det a station left [label a]
    connect s.0 -> bs1.in0 mode solid
    order a 1

``amp`` takes either two reals (solid, dashed) or four numbers
``re im re im``.  ``bs`` accepts an optional ``T``; otherwise ``T = 1 - R``.
Angles are radians.  Port names are checked when the graph is built, so a
parsed spec may still be rejected by :func:`whichway.geometry.build_graph`.
"""
from __future__ import annotations

import math
import re
from dataclasses import replace
from pathlib import Path

from .errors import Diagnostic, ParseError
from .geometry import (
    Beamsplitter,
    Detector,
    Element,
    ExperimentGraph,
    ExperimentSpec,
    Mirror,
    Mode,
    PhasePlate,
    Segment,
    SHGCrystal,
    Source,
    build_graph,
)

FORMAT_VERSION = 1

_NUMBER_RE = re.compile(r"[+-]?(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)(?:[eE][+-]?[0-9]+)?\Z")
_INT_RE = re.compile(r"[+-]?[0-9]+\Z")
_ID_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_+\-]*\Z", re.ASCII)
_NAME_RE = re.compile(r"[A-Za-z0-9_+\-]+\Z", re.ASCII)
_ENDPOINT_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_+\-]*)\.([A-Za-z0-9_]+)\Z", re.ASCII)

KEYWORDS = ("format", "source", "bs", "phase", "mirror", "shg", "det", "connect", "order")


class _LineError(Exception):
    def __init__(self, col, code, message, expected=None):
        self.col, self.code, self.message, self.expected = col, code, message, expected


_TOKEN_RE = re.compile(r"->|(?:[^\s-]|-(?!>))+")


def tokenize(line: str) -> list[tuple[str, int]]:
    """``(text, column)`` pairs; tokens split on whitespace and ``->`` is always its own token."""
    return [(m.group(), m.start() + 1) for m in _TOKEN_RE.finditer(line)]


class _Cursor:
    """Token stream of one line.  Columns are only computed when an error is reported."""

    def __init__(self, line: str):
        self.line = line
        self.tokens = (line.replace("->", " -> ") if "->" in line else line).split()
        self.i = 0
        self._cols = None

    def col(self, k: int | None = None) -> int:
        """1-based column of token ``k`` (default: the last token taken); end of line if past the end."""
        k = self.i - 1 if k is None else k
        if self._cols is None:
            self._cols = [c for _, c in tokenize(self.line)]
        return self._cols[k] if 0 <= k < len(self._cols) else len(self.line.rstrip()) + 1

    def error(self, message, expected=None, code="SyntaxError", k=None):
        return _LineError(self.col(k), code, message, expected)

    def peek(self) -> str | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, expected: str) -> str:
        if self.i >= len(self.tokens):
            raise self.error("unexpected end of line", expected, k=self.i)
        self.i += 1
        return self.tokens[self.i - 1]

    def number(self, what: str = "number") -> float:
        tok = self.take(what)
        if not _NUMBER_RE.match(tok):
            raise self.error(f"{tok!r} is not a number", what)
        x = float(tok)
        if not math.isfinite(x):
            raise self.error(f"{tok!r} overflows a double", "finite number")
        return x

    def integer(self, what: str = "integer") -> int:
        tok = self.take(what)
        if not _INT_RE.match(tok):
            raise self.error(f"{tok!r} is not an integer", what)
        return int(tok)

    def ident(self, what: str = "identifier") -> str:
        tok = self.take(what)
        if not _ID_RE.match(tok):
            raise self.error(f"{tok!r} is not a valid identifier", what)
        return tok

    def name(self, what: str) -> str:
        tok = self.take(what)
        if not _NAME_RE.match(tok):
            raise self.error(f"{tok!r} is not a valid {what}", what)
        return tok

    def keyword(self, word: str) -> None:
        tok = self.take(repr(word))
        if tok != word:
            raise self.error(f"found {tok!r}", repr(word))

    def optional(self, word: str) -> bool:
        if self.i < len(self.tokens) and self.tokens[self.i] == word:
            self.i += 1
            return True
        return False

    def done(self) -> None:
        if self.i < len(self.tokens):
            raise self.error(f"unexpected {self.tokens[self.i]!r}", "end of line", k=self.i)


def _parse_source(cur: _Cursor, ident: str) -> Source:
    if not cur.optional("amp"):
        cur.done()
        return Source(ident)
    nums = []
    while cur.peek() is not None:
        nums.append(cur.number("amplitude"))
    if len(nums) == 2:
        solid, dashed = complex(nums[0]), complex(nums[1])
    elif len(nums) == 4:
        solid, dashed = complex(nums[0], nums[1]), complex(nums[2], nums[3])
    else:
        raise cur.error(f"amp takes 2 or 4 numbers, got {len(nums)}", "solid dashed | re im re im", k=cur.i)
    return Source(ident, branches=((Mode.SOLID, solid), (Mode.DASHED, dashed)))


def _parse_bs(cur: _Cursor, ident: str) -> Beamsplitter:
    cur.keyword("R")
    R = cur.number("reflectivity")
    T = cur.number("transmissivity") if cur.optional("T") else None
    cur.done()
    return Beamsplitter(ident, R, T)


def _parse_det(cur: _Cursor, ident: str) -> Detector:
    cur.keyword("station")
    station = cur.name("station name")
    label = cur.name("label") if cur.optional("label") else None
    cur.done()
    return Detector(ident, station=station, label=label)


def _endpoint(cur: _Cursor, what: str) -> tuple[str, str, int]:
    tok = cur.take(what)
    m = _ENDPOINT_RE.match(tok)
    if not m:
        raise cur.error(f"{tok!r} is not element.port", what)
    return m.group(1), m.group(2), cur.i - 1


def parse(text: str) -> ExperimentSpec:
    """Parse experiment text; raises :class:`ParseError` with every diagnostic found."""
    if not isinstance(text, str):
        raise ParseError([Diagnostic(0, 0, "SyntaxError", "input is not text")])
    diags: list[Diagnostic] = []
    elements: list[Element] = []
    declared: dict[str, int] = {}
    connects = []  # (lineno, cursor, src, src_port, src_tok, dst, dst_port, dst_tok, mode)
    orders = []  # (lineno, cursor, ident, rank)
    lines: dict[str, int] = {}
    first_statement = True

    for lineno, raw in enumerate(text.splitlines(), start=1):
        cur = _Cursor(raw.split("#", 1)[0])
        if not cur.tokens:
            continue
        is_first, first_statement = first_statement, False
        try:
            kw = cur.take("keyword")
            if kw == "format":
                if not is_first:
                    raise cur.error("format header must be the first statement")
                ver = cur.integer("format version")
                if ver != FORMAT_VERSION:
                    raise cur.error(f"unsupported format {ver}", str(FORMAT_VERSION))
                cur.done()
            elif kw == "connect":
                s_el, s_port, s_tok = _endpoint(cur, "element.port")
                cur.keyword("->")
                d_el, d_port, d_tok = _endpoint(cur, "element.port")
                mode = None
                if cur.optional("mode"):
                    word = cur.take("solid | dashed")
                    if word not in ("solid", "dashed"):
                        raise cur.error(f"unknown mode {word!r}", "solid | dashed")
                    mode = Mode.parse(word)
                cur.done()
                connects.append((lineno, cur, s_el, s_port, s_tok, d_el, d_port, d_tok, mode))
            elif kw == "order":
                ident = cur.ident("element identifier")
                rank = cur.integer("time rank")
                cur.done()
                orders.append((lineno, cur, ident, rank))
            elif kw in KEYWORDS:
                ident = cur.ident("element identifier")
                id_tok = cur.i - 1
                if kw == "source":
                    el = _parse_source(cur, ident)
                elif kw == "bs":
                    el = _parse_bs(cur, ident)
                elif kw == "phase":
                    el = PhasePlate(ident, cur.number("angle"))
                    cur.done()
                elif kw == "mirror":
                    cur.done()
                    el = Mirror(ident)
                elif kw == "shg":
                    cur.done()
                    el = SHGCrystal(ident)
                else:
                    el = _parse_det(cur, ident)
                if ident in declared:
                    raise cur.error(f"{ident!r} already declared on line {declared[ident]}",
                                    code="DuplicateIdentifier", k=id_tok)
                declared[ident] = lineno
                lines[ident] = lineno
                elements.append(el)
            else:
                raise cur.error(f"unknown statement {kw!r}", " | ".join(KEYWORDS))
        except _LineError as e:
            diags.append(Diagnostic(lineno, e.col, e.code, e.message, e.expected))

    segments = []
    for lineno, cur, s_el, s_port, s_tok, d_el, d_port, d_tok, mode in connects:
        missing = [(el, k) for el, k in ((s_el, s_tok), (d_el, d_tok)) if el not in declared]
        for el, k in missing:
            diags.append(Diagnostic(lineno, cur.col(k), "UnknownIdentifier", f"{el!r} is not declared"))
        if not missing:
            segments.append(Segment(s_el, s_port, d_el, d_port, mode))
            lines[f"{s_el}.{s_port}->{d_el}.{d_port}"] = lineno

    ranks: dict[str, int] = {}
    for lineno, cur, ident, rank in orders:
        if ident not in declared:
            diags.append(Diagnostic(lineno, cur.col(1), "UnknownIdentifier", f"{ident!r} is not declared"))
        elif ident in ranks:
            diags.append(Diagnostic(lineno, cur.col(1), "DuplicateIdentifier", f"order for {ident!r} given twice"))
        else:
            ranks[ident] = rank
    if diags:
        raise ParseError(sorted(diags, key=lambda d: (d.line, d.col)))
    elements = [replace(e, time_rank=ranks[e.id]) if e.id in ranks else e for e in elements]
    return ExperimentSpec(tuple(elements), tuple(segments), lines)


def loads(text: str) -> ExperimentGraph:
    """Parse and build; raises :class:`ParseError` or :class:`GraphError`."""
    return build_graph(parse(text))


def load(path) -> ExperimentGraph:
    return loads(Path(path).read_text(encoding="utf-8"))


def _num(x: float) -> str:
    return repr(float(x))


def _declaration(e: Element) -> str:
    if isinstance(e, Source):
        amps = {m: a for m, a in e.branches}
        solid, dashed = complex(amps.get(Mode.SOLID, 0j)), complex(amps.get(Mode.DASHED, 0j))
        if solid.imag == 0 and dashed.imag == 0:
            return f"source {e.id} amp {_num(solid.real)} {_num(dashed.real)}"
        return f"source {e.id} amp {_num(solid.real)} {_num(solid.imag)} {_num(dashed.real)} {_num(dashed.imag)}"
    if isinstance(e, Beamsplitter):
        tail = "" if e.T == 1.0 - e.R else f" T {_num(e.T)}"
        return f"bs {e.id} R {_num(e.R)}{tail}"
    if isinstance(e, PhasePlate):
        return f"phase {e.id} {_num(e.angle)}"
    if isinstance(e, Mirror):
        return f"mirror {e.id}"
    if isinstance(e, SHGCrystal):
        return f"shg {e.id}"
    if isinstance(e, Detector):
        tail = "" if e.label == e.id else f" label {e.label}"
        return f"det {e.id} station {e.station}{tail}"
    raise TypeError(f"cannot serialize {type(e).__name__}")


def _group(e: Element) -> int:
    return 0 if isinstance(e, Source) else 2 if isinstance(e, Detector) else 1


def serialize(graph: ExperimentGraph) -> str:
    """Canonical text: sources, other elements, detectors, sorted connections, orders."""
    elements = sorted(graph.elements, key=_group)  # stable: keeps declaration order per group
    out = [f"format {FORMAT_VERSION}"]
    out += [_declaration(e) for e in elements]
    conns = []
    for s in graph.segments:
        mode = f" mode {s.mode.word}" if s.mode is not None else ""
        conns.append(f"connect {s.src}.{s.src_port} -> {s.dst}.{s.dst_port}{mode}")
    out += sorted(conns)
    out += [f"order {e.id} {e.time_rank}" for e in elements if e.time_rank != 0]
    return "\n".join(out) + "\n"


def dump(graph: ExperimentGraph, path) -> None:
    Path(path).write_text(serialize(graph), encoding="utf-8")
