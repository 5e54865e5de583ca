"""Enumeration of multi-photon histories and their complex amplitudes.

A history fixes one emission branch per source and one routing choice
(transmit or reflect) each time a photon meets a beamsplitter.  Its
amplitude is the product of every factor picked up along the way.
Photons are tracked individually: source photons are labelled
``"<source>.<port>"`` and a second-harmonic photon is labelled
``"<crystal>[<a>+<b>]"`` from the two photons it replaced.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterator, Mapping

from .errors import GraphError
from .geometry import (
    Beamsplitter,
    Detector,
    ExperimentGraph,
    Mirror,
    Mode,
    PhasePlate,
    SHGCrystal,
    validate,
)

TRANSMIT = "T"
REFLECT = "R"


@dataclass(frozen=True)
class Factor:
    element: str
    photon: str
    kind: str
    value: complex


@dataclass(frozen=True)
class Arrival:
    station: str
    label: str
    detector: str
    photon: str


@dataclass(frozen=True)
class History:
    source_choices: tuple[tuple[str, Mode], ...]
    routing_choices: tuple[tuple[tuple[str, str], str], ...]
    endpoints: tuple[Arrival, ...]
    factors: tuple[Factor, ...]
    amplitude: complex

    @property
    def key(self) -> tuple:
        return (
            tuple((s, m.value) for s, m in self.source_choices),
            tuple(sorted(self.routing_choices)),
        )

    def outcome(self) -> dict[str, str] | None:
        """Station -> fired label, or None unless each station saw exactly one arrival."""
        out: dict[str, str] = {}
        for a in self.endpoints:
            if a.station in out:
                return None
            out[a.station] = a.label
        return out

    def to_json(self) -> dict:
        return {
            "source_choices": {s: m.word for s, m in self.source_choices},
            "routing": [
                {"beamsplitter": bs, "photon": ph, "choice": "transmit" if c == TRANSMIT else "reflect"}
                for (bs, ph), c in self.routing_choices
            ],
            "endpoints": [{"station": a.station, "label": a.label, "photon": a.photon} for a in self.endpoints],
            "factors": [
                {"element": f.element, "photon": f.photon, "kind": f.kind, "re": f.value.real, "im": f.value.imag}
                for f in self.factors
            ],
            "amplitude": {"re": self.amplitude.real, "im": self.amplitude.imag},
        }


class _Discard(Exception):
    """Raised inside a walk when a history is geometrically impossible."""


def _require_valid(graph: ExperimentGraph) -> None:
    issues = validate(graph)
    if issues:
        raise GraphError(issues)


def _matches(outcome: Mapping[str, str] | None, filt: Mapping[str, str]) -> bool:
    return outcome is not None and all(outcome.get(k) == v for k, v in filt.items())


def _element_branches(graph, el, arrivals, forced):
    """Yield ``(moves, factors, choices, endpoints)`` for the photons arriving at ``el``.

    ``arrivals`` is a list of ``(port, photon)``; ``moves`` are the photons
    leaving on output ports as ``(port, photon)``.
    """
    if isinstance(el, Beamsplitter):
        options = []
        for port, ph in arrivals:
            straight, crossed = ("out0", "out1") if port == "in0" else ("out1", "out0")
            opts = [
                (straight, Factor(el.id, ph, "transmit", el.t), TRANSMIT),
                (crossed, Factor(el.id, ph, "reflect", el.r), REFLECT),
            ]
            if forced is not None:
                want = forced.get((el.id, ph))
                if want is None:
                    raise KeyError(f"history has no routing choice for {ph} at {el.id}")
                opts = [o for o in opts if o[2] == want]
            options.append([(ph, o) for o in opts])
        for combo in itertools.product(*options):
            moves = [(out, ph) for ph, (out, _, _) in combo]
            factors = [f for _, (_, f, _) in combo]
            choices = [((el.id, ph), c) for ph, (_, _, c) in combo]
            yield moves, factors, choices, []
    elif isinstance(el, PhasePlate):
        yield [("out", ph) for _, ph in arrivals], [Factor(el.id, ph, "phase", el.factor) for _, ph in arrivals], [], []
    elif isinstance(el, Mirror):
        yield [("out", ph) for _, ph in arrivals], [Factor(el.id, ph, "mirror", 1 + 0j) for _, ph in arrivals], [], []
    elif isinstance(el, SHGCrystal):
        yield shg_merge(el, arrivals)
    elif isinstance(el, Detector):
        yield [], [], [], [Arrival(el.station, el.label, el.id, ph) for _, ph in arrivals]
    else:
        raise TypeError(f"{el.kind} {el.id} cannot receive photons")


def shg_merge(crystal: SHGCrystal, arrivals):
    """Apply the two-photon rule at one crystal.

    One photon on each input merges into a single second-harmonic photon on
    ``out`` (factor 1).  Photons arriving on one input only pass through on
    ``thru0``/``thru1``.  Any other combination is not a valid history.
    """
    left = [ph for port, ph in arrivals if port == "in0"]
    right = [ph for port, ph in arrivals if port == "in1"]
    if len(left) == 1 and len(right) == 1:
        merged = f"{crystal.id}[{left[0]}+{right[0]}]"
        return [("out", merged)], [Factor(crystal.id, merged, "merge", 1 + 0j)], [], []
    if left and right:
        raise _Discard(f"{len(left)}+{len(right)} photons at crystal {crystal.id}")
    return [("thru0", ph) for ph in left] + [("thru1", ph) for ph in right], [], [], []


def _source_assignments(graph: ExperimentGraph):
    """Emission branches per source; a zero-amplitude branch is never emitted."""
    sources = graph.sources
    return sources, itertools.product(*[[b for b in s.branches if b[1] != 0] for s in sources])


def _walk(graph: ExperimentGraph, choice, forced=None, filt=None) -> Iterator[History]:
    """Propagate the photons of one source assignment through the graph."""
    order = graph.topological_order
    factors0 = []
    pending0: list[tuple[str, str, str]] = []
    for src, (mode, amp) in choice:
        factors0.append(Factor(src.id, src.id, f"source:{mode.word}", amp))
        for seg in graph.source_segments(src.id, mode):
            pending0.append((seg.dst, seg.dst_port, f"{src.id}.{seg.src_port}"))
    source_choices = tuple((src.id, mode) for src, (mode, _) in choice)

    def step(i, pending, factors, choices, endpoints):
        while i < len(order) and not any(p[0] == order[i] for p in pending):
            i += 1
        if i == len(order):
            amp = 1 + 0j
            for f in factors:
                amp *= f.value
            yield History(source_choices, tuple(choices), tuple(endpoints), tuple(factors), amp)
            return
        el = graph[order[i]]
        here = [(port, ph) for e, port, ph in pending if e == el.id]
        rest = [p for p in pending if p[0] != el.id]
        try:
            branches = list(_element_branches(graph, el, here, forced))
        except _Discard:
            return
        for moves, fs, cs, ends in branches:
            if filt is not None and ends:
                seen = {a.station for a in endpoints}
                if any(a.station in seen or (a.station in filt and filt[a.station] != a.label) for a in ends):
                    continue
                if len({a.station for a in ends}) != len(ends):
                    continue
            nxt = list(rest)
            lost = False
            for port, ph in moves:
                dest = graph.route(el.id, port)
                if dest is None:
                    lost = True  # a lone photon left through an unconnected port
                    break
                nxt.append((dest[0], dest[1], ph))
            if lost:
                continue
            yield from step(i + 1, nxt, factors + fs, choices + cs, endpoints + ends)

    yield from step(0, pending0, factors0, [], [])


def enumerate_histories(graph: ExperimentGraph, filter: Mapping[str, str] | None = None) -> list[History]:
    """Every consistent history of ``graph``, sorted by history key.

    ``filter`` maps stations to detector labels; only histories whose outcome
    agrees on those stations are returned.
    """
    _require_valid(graph)
    sources, assignments = _source_assignments(graph)
    if not sources:
        return []
    out = []
    for combo in assignments:
        for h in _walk(graph, list(zip(sources, combo)), filt=filter):
            if filter is None or _matches(h.outcome(), filter):
                out.append(h)
    out.sort(key=lambda h: h.key)
    return out


def history_amplitude(graph: ExperimentGraph, h: History) -> complex:
    """Recompute a history's amplitude by replaying its choices through the graph."""
    sources = {s.id: s for s in graph.sources}
    choice = []
    for sid, mode in h.source_choices:
        if sid not in sources:
            raise ValueError(f"history uses source {sid!r}, which is not in this graph")
        src = sources[sid]
        choice.append((src, (mode, src.amplitude(mode))))
    forced = dict(h.routing_choices)
    try:
        replays = list(_walk(graph, choice, forced=forced))
    except KeyError as exc:
        raise ValueError(str(exc)) from None
    if len(replays) != 1:
        raise ValueError("history does not belong to this graph")
    return replays[0].amplitude


def group_by_outcome(graph: ExperimentGraph, histories) -> dict[tuple[str, ...], list[History]]:
    """Bucket histories by outcome tuple in ``graph.station_names`` order."""
    stations = graph.station_names
    buckets: dict[tuple[str, ...], list[History]] = {}
    for h in histories:
        oc = h.outcome()
        if oc is None or set(oc) != set(stations):
            continue
        buckets.setdefault(tuple(oc[s] for s in stations), []).append(h)
    return buckets


def histories_json(histories) -> str:
    return json.dumps([h.to_json() for h in histories], indent=2)
