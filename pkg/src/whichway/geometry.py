"""Optical-element graph model.

An experiment is a directed acyclic graph whose nodes are optical elements
and whose edges are path segments joining an output port of one element to
an input port of another.  Port conventions:

=============  ======================  ==================================
element        inputs                  outputs
=============  ======================  ==================================
Source         (none)                  any integer port; segment carries
                                       the emission mode (solid/dashed)
Beamsplitter   ``in0``, ``in1``        ``out0``, ``out1``
PhasePlate     ``in``                  ``out``
Mirror         ``in``                  ``out``
SHGCrystal     ``in0``, ``in1``        ``out`` (second harmonic),
                                       ``thru0``, ``thru1`` (optional)
Detector       ``in``                  (none)
=============  ======================  ==================================

A beamsplitter transmits ``in0 -> out0`` and ``in1 -> out1`` with factor
``sqrt(T)`` and reflects ``in0 -> out1`` and ``in1 -> out0`` with factor
``i*sqrt(R)``.  An SHG crystal sits where two paths cross: if one photon
arrives on each input they merge into a single photon on ``out``; a lone
photon continues on the matching ``thru`` port (or is lost if that port is
unconnected).
"""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import ClassVar, Mapping

import networkx as nx

from .errors import GraphError, Issue

TOL = 1e-9
_PORT_NUMBER_RE = re.compile(r"[0-9]+\Z")
INV_SQRT2 = 1 / math.sqrt(2)


class Mode(Enum):
    """Emission mode of a source segment; solid is qubit 0, dashed qubit 1."""

    SOLID = 0
    DASHED = 1

    @property
    def qubit(self) -> int:
        return self.value

    @property
    def word(self) -> str:
        return self.name.lower()

    @classmethod
    def parse(cls, text: str) -> "Mode":
        try:
            return cls[text.upper()]
        except KeyError:
            raise ValueError(f"unknown mode {text!r}") from None


DEFAULT_BRANCHES = ((Mode.SOLID, complex(INV_SQRT2)), (Mode.DASHED, complex(INV_SQRT2)))


@dataclass(frozen=True)
class Element:
    id: str
    time_rank: int = field(default=0, kw_only=True)

    kind: ClassVar[str] = "element"
    inputs: ClassVar[tuple[str, ...]] = ()
    outputs: ClassVar[tuple[str, ...]] = ()
    required_outputs: ClassVar[tuple[str, ...]] = ()

    def has_input(self, port: str) -> bool:
        return port in self.inputs

    def has_output(self, port: str) -> bool:
        return port in self.outputs

    def signature(self) -> tuple:
        """Everything except the identifier; used for isomorphism checks."""
        return (self.kind, self.time_rank)


@dataclass(frozen=True)
class Source(Element):
    branches: tuple[tuple[Mode, complex], ...] = DEFAULT_BRANCHES

    kind: ClassVar[str] = "source"

    def has_output(self, port: str) -> bool:
        return _PORT_NUMBER_RE.match(port) is not None

    def amplitude(self, mode: Mode) -> complex:
        for m, a in self.branches:
            if m is mode:
                return a
        return 0j

    def signature(self) -> tuple:
        return (self.kind, self.time_rank, tuple((m.value, a) for m, a in self.branches))


@dataclass(frozen=True)
class Beamsplitter(Element):
    R: float = 0.5
    T: float | None = None

    kind: ClassVar[str] = "bs"
    inputs: ClassVar[tuple[str, ...]] = ("in0", "in1")
    outputs: ClassVar[tuple[str, ...]] = ("out0", "out1")
    required_outputs: ClassVar[tuple[str, ...]] = ("out0", "out1")

    def __post_init__(self):
        if self.T is None:
            object.__setattr__(self, "T", 1.0 - self.R)

    @property
    def t(self) -> complex:
        return complex(math.sqrt(max(self.T, 0.0)))

    @property
    def r(self) -> complex:
        return 1j * math.sqrt(max(self.R, 0.0))

    def signature(self) -> tuple:
        return (self.kind, self.time_rank, self.R, self.T)


@dataclass(frozen=True)
class PhasePlate(Element):
    angle: float = 0.0

    kind: ClassVar[str] = "phase"
    inputs: ClassVar[tuple[str, ...]] = ("in",)
    outputs: ClassVar[tuple[str, ...]] = ("out",)
    required_outputs: ClassVar[tuple[str, ...]] = ("out",)

    @property
    def factor(self) -> complex:
        return cmath.exp(1j * self.angle)

    def signature(self) -> tuple:
        return (self.kind, self.time_rank, self.angle)


@dataclass(frozen=True)
class Mirror(Element):
    kind: ClassVar[str] = "mirror"
    inputs: ClassVar[tuple[str, ...]] = ("in",)
    outputs: ClassVar[tuple[str, ...]] = ("out",)
    required_outputs: ClassVar[tuple[str, ...]] = ("out",)


@dataclass(frozen=True)
class SHGCrystal(Element):
    kind: ClassVar[str] = "shg"
    inputs: ClassVar[tuple[str, ...]] = ("in0", "in1")
    outputs: ClassVar[tuple[str, ...]] = ("out", "thru0", "thru1")
    required_outputs: ClassVar[tuple[str, ...]] = ("out",)


@dataclass(frozen=True)
class Detector(Element):
    station: str = ""
    label: str | None = None

    kind: ClassVar[str] = "det"
    inputs: ClassVar[tuple[str, ...]] = ("in",)

    def __post_init__(self):
        if self.label is None:
            object.__setattr__(self, "label", self.id)

    def signature(self) -> tuple:
        return (self.kind, self.time_rank, self.station, self.label)


@dataclass(frozen=True)
class Segment:
    src: str
    src_port: str
    dst: str
    dst_port: str
    mode: Mode | None = None


@dataclass(frozen=True)
class ExperimentSpec:
    """Unvalidated build input: elements, segments and optional source lines."""

    elements: tuple[Element, ...] = ()
    segments: tuple[Segment, ...] = ()
    lines: Mapping[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class ExperimentGraph:
    elements: tuple[Element, ...] = ()
    segments: tuple[Segment, ...] = ()

    # -- lookups -----------------------------------------------------------
    @cached_property
    def by_id(self) -> dict[str, Element]:
        return {e.id: e for e in self.elements}

    def __getitem__(self, element_id: str) -> Element:
        return self.by_id[element_id]

    @cached_property
    def _routes(self) -> dict[tuple[str, str], Segment]:
        return {(s.src, s.src_port): s for s in self.segments}

    def route(self, element_id: str, port: str) -> tuple[str, str] | None:
        """Destination ``(element, port)`` fed by an output port, or None if unconnected."""
        seg = self._routes.get((element_id, port))
        return None if seg is None else (seg.dst, seg.dst_port)

    def outgoing(self, element_id: str) -> list[Segment]:
        return [s for s in self.segments if s.src == element_id]

    def incoming(self, element_id: str) -> list[Segment]:
        return [s for s in self.segments if s.dst == element_id]

    @property
    def sources(self) -> list[Source]:
        return [e for e in self.elements if isinstance(e, Source)]

    @property
    def detectors(self) -> list[Detector]:
        return [e for e in self.elements if isinstance(e, Detector)]

    @cached_property
    def stations(self) -> dict[str, tuple[Detector, ...]]:
        """Station name -> its detectors, in order of first appearance."""
        out: dict[str, list[Detector]] = {}
        for d in self.detectors:
            out.setdefault(d.station, []).append(d)
        return {k: tuple(v) for k, v in out.items()}

    @property
    def station_names(self) -> tuple[str, ...]:
        return tuple(self.stations)

    def station_labels(self, station: str) -> tuple[str, ...]:
        return tuple(d.label for d in self.stations[station])

    def station_rank(self, station: str) -> int:
        return min(d.time_rank for d in self.stations[station])

    def source_segments(self, source_id: str, mode: Mode) -> list[Segment]:
        """Segments a source emits into for one branch, sorted by port number."""
        segs = [s for s in self.outgoing(source_id) if s.mode is mode]
        return sorted(segs, key=lambda s: int(s.src_port))

    # -- graph views -------------------------------------------------------
    def to_networkx(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        for e in self.elements:
            g.add_node(e.id, sig=e.signature())
        for s in self.segments:
            g.add_edge(s.src, s.dst, sig=(s.src_port, s.dst_port, s.mode.value if s.mode else None))
        return g

    @cached_property
    def topological_order(self) -> tuple[str, ...]:
        index = {e.id: i for i, e in enumerate(self.elements)}
        g = nx.DiGraph()
        g.add_nodes_from(index)
        g.add_edges_from((s.src, s.dst) for s in self.segments if s.src in index and s.dst in index)
        return tuple(nx.lexicographical_topological_sort(g, key=index.__getitem__))

    def without_time_ranks(self) -> "ExperimentGraph":
        from dataclasses import replace

        return ExperimentGraph(tuple(replace(e, time_rank=0) for e in self.elements), self.segments)


# ---------------------------------------------------------------------------
# validation

_ID_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_+\-]*\Z", re.ASCII)


def _finite(*xs) -> bool:
    return all(math.isfinite(getattr(x, "real", x)) and math.isfinite(getattr(x, "imag", 0.0)) for x in xs)


def validate(graph: ExperimentGraph, lines: Mapping[str, int] | None = None) -> list[Issue]:
    """Return every invariant violation; an empty list means the graph is usable."""
    lines = lines or {}
    issues: list[Issue] = []

    def add(code, msg, el=None, key=None):
        issues.append(Issue(code, msg, el, lines.get(key if key is not None else el)))

    seen: set[str] = set()
    for e in graph.elements:
        if e.id in seen:
            add("DuplicateIdentifier", f"element {e.id!r} declared twice", e.id)
        seen.add(e.id)
        if not _ID_RE.match(e.id):
            add("BadIdentifier", f"invalid identifier {e.id!r}", e.id)

    for e in graph.elements:
        if isinstance(e, Beamsplitter):
            if not _finite(e.R, e.T) or not (0 <= e.R <= 1 and 0 <= e.T <= 1) or abs(e.R + e.T - 1) > TOL:
                add("BadBeamsplitterCoefficients", f"{e.id}: R={e.R!r}, T={e.T!r} violates R+T=1 with R,T in [0,1]", e.id)
        elif isinstance(e, Source):
            amps = [a for _, a in e.branches]
            modes = [m for m, _ in e.branches]
            if len(set(modes)) != len(modes):
                add("BadSourceNormalization", f"{e.id}: repeated branch mode", e.id)
            if not _finite(*amps):
                add("BadSourceNormalization", f"{e.id}: non-finite branch amplitude", e.id)
            elif abs(sum(abs(a) ** 2 for a in amps) - 1) > TOL:
                add("BadSourceNormalization", f"{e.id}: branch weights sum to {sum(abs(a) ** 2 for a in amps)!r}", e.id)
        elif isinstance(e, PhasePlate):
            if not _finite(e.angle):
                add("BadParameter", f"{e.id}: non-finite phase", e.id)

    # segment endpoints
    used_out: dict[tuple[str, str], int] = {}
    used_in: dict[tuple[str, str], int] = {}
    good_segments = []
    for s in graph.segments:
        key = f"{s.src}.{s.src_port}->{s.dst}.{s.dst_port}"
        src, dst = graph.by_id.get(s.src), graph.by_id.get(s.dst)
        ok = True
        if src is None or dst is None:
            missing = s.src if src is None else s.dst
            add("DanglingSegment", f"segment {key} references undeclared element {missing!r}", missing, key)
            continue
        if isinstance(src, Detector):
            add("TopologyError", f"detector {src.id} has an outgoing segment", src.id, key)
            ok = False
        elif not src.has_output(s.src_port):
            add("DanglingSegment", f"{src.kind} {src.id} has no output port {s.src_port!r}", src.id, key)
            ok = False
        if isinstance(dst, Source):
            add("TopologyError", f"source {dst.id} has an incoming segment", dst.id, key)
            ok = False
        elif not dst.has_input(s.dst_port):
            add("DanglingSegment", f"{dst.kind} {dst.id} has no input port {s.dst_port!r}", dst.id, key)
            ok = False
        if isinstance(src, Source):
            if s.mode is None:
                add("BadSourceWiring", f"source segment {key} needs a mode tag", src.id, key)
                ok = False
            elif s.mode not in {m for m, _ in src.branches}:
                add("BadSourceWiring", f"source {src.id} has no {s.mode.word} branch", src.id, key)
                ok = False
        used_out[(s.src, s.src_port)] = used_out.get((s.src, s.src_port), 0) + 1
        used_in[(s.dst, s.dst_port)] = used_in.get((s.dst, s.dst_port), 0) + 1
        if ok:
            good_segments.append(s)

    for (el, port), n in used_out.items():
        if n > 1:
            add("PortConflict", f"output {el}.{port} drives {n} segments", el)
    for (el, port), n in used_in.items():
        if n > 1 and not isinstance(graph.by_id.get(el), Detector):
            add("PortConflict", f"input {el}.{port} is fed by {n} segments", el)

    # arity
    outs_of: dict[str, set[str]] = {}
    ins_of: dict[str, set[str]] = {}
    for el, p in used_out:
        outs_of.setdefault(el, set()).add(p)
    for el, p in used_in:
        ins_of.setdefault(el, set()).add(p)
    for e in graph.elements:
        outs = outs_of.get(e.id, set())
        ins = ins_of.get(e.id, set())
        if isinstance(e, SHGCrystal):
            if ins != {"in0", "in1"} or "out" not in outs:
                add("SHGArityError", f"crystal {e.id} needs both inputs and the out port connected "
                    f"(inputs: {sorted(ins)}, outputs: {sorted(outs)})", e.id)
        elif isinstance(e, Beamsplitter):
            if outs != {"out0", "out1"}:
                add("BeamsplitterArity", f"beamsplitter {e.id} needs both outputs connected", e.id)
        elif isinstance(e, (PhasePlate, Mirror)):
            if ins and "out" not in outs:
                add("PathDoesNotTerminate", f"{e.kind} {e.id} has no outgoing segment", e.id)
        elif isinstance(e, Source):
            mine = [s.mode for s in good_segments if s.src == e.id]
            counts = {m: mine.count(m) for m, a in e.branches if a != 0}
            if counts and len(set(counts.values())) > 1:
                add("BadSourceWiring", f"source {e.id} emits unequal photon numbers per branch", e.id)
            if counts and min(counts.values()) == 0:
                add("BadSourceWiring", f"source {e.id} has a nonzero branch without segments", e.id)

    # acyclicity
    g = nx.DiGraph()
    g.add_nodes_from(graph.by_id)
    g.add_edges_from((s.src, s.dst) for s in good_segments)
    if not nx.is_directed_acyclic_graph(g):
        cycle = nx.find_cycle(g)
        add("CyclicGraph", "cycle through " + " -> ".join(u for u, _ in cycle), cycle[0][0])

    # detectors: station naming and consistent ranks
    for st, dets in graph.stations.items():
        if not st:
            add("TopologyError", f"detector {dets[0].id} has no station", dets[0].id)
        labels = [d.label for d in dets]
        if len(set(labels)) != len(labels):
            add("DuplicateIdentifier", f"station {st!r} repeats a detector label", dets[0].id)
        if len({d.time_rank for d in dets}) > 1:
            add("InconsistentStationOrder", f"detectors of station {st!r} disagree on time rank", dets[0].id)
    return issues


def build_graph(spec: ExperimentSpec) -> ExperimentGraph:
    """Build and validate a graph; raises :class:`GraphError` listing every violation."""
    graph = ExperimentGraph(tuple(spec.elements), tuple(spec.segments))
    issues = validate(graph, spec.lines)
    if issues:
        raise GraphError(issues)
    return graph


def isomorphic(g1: ExperimentGraph, g2: ExperimentGraph, ignore_time_rank: bool = False) -> bool:
    """Structural equality up to renaming of element identifiers."""
    if ignore_time_rank:
        g1, g2 = g1.without_time_ranks(), g2.without_time_ranks()

    def edges_match(a, b):
        return sorted(map(repr, (d["sig"] for d in a.values()))) == sorted(map(repr, (d["sig"] for d in b.values())))

    return nx.is_isomorphic(
        g1.to_networkx(), g2.to_networkx(),
        node_match=lambda a, b: a["sig"] == b["sig"],
        edge_match=edges_match,
    )


class GraphBuilder:
    """Incremental construction of an :class:`ExperimentGraph`.

    >>> b = GraphBuilder()
    >>> b.add(Source("s")); b.add(Detector("d0", station="A")); b.add(Detector("d1", station="A"))
    >>> b.connect("s.0", "d0.in", mode="solid"); b.connect("s.1", "d1.in", mode="dashed")
    >>> len(b.build().detectors)
    2
    """

    def __init__(self):
        self._elements: list[Element] = []
        self._segments: list[Segment] = []

    def add(self, element: Element) -> Element:
        self._elements.append(element)
        return element

    def connect(self, src: str, dst: str, mode: Mode | str | None = None) -> None:
        s_el, s_port = src.rsplit(".", 1)
        d_el, d_port = dst.rsplit(".", 1)
        if isinstance(mode, str):
            mode = Mode.parse(mode)
        self._segments.append(Segment(s_el, s_port, d_el, d_port, mode))

    def spec(self) -> ExperimentSpec:
        return ExperimentSpec(tuple(self._elements), tuple(self._segments))

    def build(self) -> ExperimentGraph:
        return build_graph(self.spec())

    def unchecked(self) -> ExperimentGraph:
        """The graph as declared, without validation (for inspecting :func:`validate` reports)."""
        return ExperimentGraph(tuple(self._elements), tuple(self._segments))

