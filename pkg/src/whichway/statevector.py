"""Conventional state-vector treatment used as an independent oracle.

Each photon of a source is a which-way qubit (solid path = |0>, dashed
path = |1>).  The prepared state is the tensor product of the sources'
branch superpositions.  Every measurement station is reduced to a set of
detector kets on its own qubits: the optics downstream of the sources are
applied as element unitaries to each computational-basis input, summing
amplitudes element by element, and the detector's ket is the conjugate of
its response.  Joint probabilities then follow from the Born rule, either
in one step or as a chain of Born-rule and collapse steps.
"""
from __future__ import annotations

import itertools
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import networkx as nx
import numpy as np

from .errors import (
    BadCoefficients,
    DimensionMismatch,
    GraphError,
    IncompleteBasis,
    NoBornRealization,
    OrderMismatch,
)
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
from .probability import JointDistribution, joint_distribution

NORM_TOL = 1e-12
GRAM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray
    qubits: tuple[str, ...]

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2 ** len(self.qubits):
            raise DimensionMismatch(f"{amps.size} amplitudes for {len(self.qubits)} qubits")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "qubits", tuple(self.qubits))

    @property
    def n(self) -> int:
        return len(self.qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape([2] * self.n) if self.n else self.amplitudes.reshape(())

    def permuted(self, order: Sequence[str]) -> "StateVector":
        order = tuple(order)
        if sorted(order) != sorted(self.qubits):
            raise DimensionMismatch(f"qubits {order} do not match state qubits {self.qubits}")
        axes = [self.qubits.index(q) for q in order]
        return StateVector(np.transpose(self.tensor(), axes).reshape(-1), order)

    def amplitude(self, bits: str) -> complex:
        return complex(self.amplitudes[int(bits, 2)]) if bits else complex(self.amplitudes[0])


@dataclass(frozen=True, eq=False)
class DetectorKet:
    """A detector's ket on one or two qubits, coefficients in computational-basis order."""

    label: str
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex).reshape(-1)
        if c.size == 0 or c.size & (c.size - 1):
            raise DimensionMismatch(f"ket of length {c.size} is not a qubit register")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coefficients", c)

    @property
    def n_qubits(self) -> int:
        return int(self.coefficients.size).bit_length() - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def conj(self) -> "DetectorKet":
        return DetectorKet(self.label, self.coefficients.conj())

    def __getitem__(self, bits: str) -> complex:
        return complex(self.coefficients[int(bits, 2)])


def gram_residual(kets: Sequence[DetectorKet]) -> float:
    """max |<k_i|k_j> - delta_ij| over the set."""
    K = np.array([k.coefficients for k in kets])
    G = K.conj() @ K.T
    return float(np.max(np.abs(G - np.eye(len(kets))))) if len(kets) else 0.0


# ---------------------------------------------------------------------------
# qubits of a graph

@dataclass(frozen=True)
class Qubit:
    label: str
    source: str
    index: int
    paths: tuple[tuple[Mode, tuple[str, str] | None], ...]

    def entry(self, mode: Mode) -> tuple[str, str] | None:
        return dict(self.paths).get(mode)


def graph_qubits(graph: ExperimentGraph) -> list[Qubit]:
    """Which-way qubits in left-to-right order: sources in declaration order, photons by port."""
    out = []
    for src in graph.sources:
        per_mode = {m: graph.source_segments(src.id, m) for m in Mode}
        n = max(len(v) for v in per_mode.values())
        for k in range(n):
            paths = tuple(
                (m, (segs[k].dst, segs[k].dst_port) if k < len(segs) else None) for m, segs in per_mode.items()
            )
            out.append(Qubit(f"{src.id}.{k}", src.id, k, paths))
    return out


def prepare_state(graph: ExperimentGraph) -> StateVector:
    """Tensor product over sources of ``sum_branch amp * |mode ... mode>``."""
    _require_valid(graph)
    qubits = graph_qubits(graph)
    psi = np.ones(1, dtype=complex)
    for src in graph.sources:
        n = sum(1 for q in qubits if q.source == src.id)
        if n == 0:
            continue
        v = np.zeros(2 ** n, dtype=complex)
        v[0] = src.amplitude(Mode.SOLID)
        v[-1] += src.amplitude(Mode.DASHED)
        psi = np.kron(psi, v)
    return StateVector(psi, tuple(q.label for q in qubits))


def _require_valid(graph):
    issues = validate(graph)
    if issues:
        raise GraphError(issues)


# ---------------------------------------------------------------------------
# element-by-element evolution of a few photons

def _element_action(el, arrivals):
    """``[(moves, weight)]`` for photons ``[(photon, port)]`` entering ``el``."""
    if isinstance(el, Beamsplitter):
        t, r = math.sqrt(max(el.T, 0.0)), 1j * math.sqrt(max(el.R, 0.0))
        U = np.array([[t, r], [r, t]])  # rows out0/out1, columns in0/in1
        per_photon = []
        for ph, port in arrivals:
            j = 0 if port == "in0" else 1
            per_photon.append([((ph, f"out{i}"), U[i, j]) for i in range(2)])
        result = []
        for combo in itertools.product(*per_photon):
            w = 1 + 0j
            for _, x in combo:
                w *= x
            result.append(([m for m, _ in combo], w))
        return result
    if isinstance(el, PhasePlate):
        return [([(ph, "out") for ph, _ in arrivals], np.exp(1j * el.angle) ** len(arrivals))]
    if isinstance(el, Mirror):
        return [([(ph, "out") for ph, _ in arrivals], 1 + 0j)]
    if isinstance(el, SHGCrystal):
        a = [ph for ph, port in arrivals if port == "in0"]
        b = [ph for ph, port in arrivals if port == "in1"]
        if len(a) == 1 and len(b) == 1:
            return [([(f"({a[0]}*{b[0]})", "out")], 1 + 0j)]
        if a and b:
            return []
        return [([(ph, "thru0") for ph in a] + [(ph, "thru1") for ph in b], 1 + 0j)]
    if isinstance(el, Detector):
        return [([(ph, "*") for ph, _ in arrivals], 1 + 0j)]
    raise TypeError(f"{el.kind} {el.id} cannot receive photons")


def evolve(graph: ExperimentGraph, photons: dict[str, tuple[str, str]]) -> dict[tuple, complex]:
    """Evolve labelled photons from their entry ports to the detectors.

    Returns ``{((photon, detector_id), ...): amplitude}``.  Amplitudes of
    configurations that coincide are summed after every element.
    """
    state = {tuple(sorted((ph, el, port) for ph, (el, port) in photons.items())): 1 + 0j}
    for el_id in graph.topological_order:
        el = graph[el_id]
        new: dict[tuple, complex] = defaultdict(complex)
        for cfg, amp in state.items():
            here = [(ph, port) for ph, e, port in cfg if e == el_id and port != "*"]
            if not here:
                new[cfg] += amp
                continue
            rest = [t for t in cfg if not (t[1] == el_id and t[2] != "*")]
            for moves, w in _element_action(el, here):
                placed = list(rest)
                for ph, port in moves:
                    if port == "*":
                        placed.append((ph, el_id, "*"))
                        continue
                    dest = graph.route(el_id, port)
                    if dest is None:
                        break
                    placed.append((ph, dest[0], dest[1]))
                else:
                    new[tuple(sorted(placed))] += amp * w
        state = dict(new)
    return {
        tuple((ph, el) for ph, el, _ in cfg): amp
        for cfg, amp in state.items()
        if all(port == "*" for _, _, port in cfg)
    }


# ---------------------------------------------------------------------------
# measurements

@dataclass(frozen=True)
class Measurement:
    """A projective measurement of ``qubits`` with one ket per detector label."""

    station: str
    qubits: tuple[str, ...]
    kets: tuple[DetectorKet, ...]
    time_rank: int | None = None

    def ket(self, label: str) -> DetectorKet:
        for k in self.kets:
            if k.label == label:
                return k
        raise KeyError(label)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(k.label for k in self.kets)


def _downstream_detectors(graph, nxg, entry):
    if entry is None:
        return set()
    nodes = {entry[0]} | nx.descendants(nxg, entry[0])
    return {n for n in nodes if isinstance(graph[n], Detector)}


def _crystal_side(graph, entry) -> int:
    """0 if the photon first meets crystals on ``in0``, 1 on ``in1``, 0 without crystals."""
    frontier, seen = [entry], set()
    while frontier:
        el, port = frontier.pop(0)
        if (el, port) in seen:
            continue
        seen.add((el, port))
        node = graph[el]
        if isinstance(node, SHGCrystal):
            return 0 if port == "in0" else 1
        for seg in graph.outgoing(el):
            frontier.append((seg.dst, seg.dst_port))
    return 0


def station_measurements(graph: ExperimentGraph) -> list[Measurement]:
    """Derive every station's qubits and detector kets from the optics."""
    _require_valid(graph)
    nxg = nx.DiGraph()
    nxg.add_nodes_from(graph.by_id)
    nxg.add_edges_from((s.src, s.dst) for s in graph.segments)
    qubits = graph_qubits(graph)
    owner: dict[str, list[Qubit]] = defaultdict(list)
    for q in qubits:
        dets = set()
        for _, entry in q.paths:
            dets |= _downstream_detectors(graph, nxg, entry)
        stations = {graph[d].station for d in dets}
        if len(stations) != 1:
            raise NoBornRealization(f"qubit {q.label} reaches stations {sorted(stations)}")
        owner[stations.pop()].append(q)

    out = []
    for st in graph.station_names:
        qs = owner.get(st, [])
        if not qs:
            raise NoBornRealization(f"station {st} receives no source photons")
        qs = sorted(qs, key=lambda q: (_crystal_side(graph, q.entry(Mode.SOLID) or q.entry(Mode.DASHED)), qubits.index(q)))
        dets = graph.stations[st]
        response = np.zeros((len(dets), 2 ** len(qs)), dtype=complex)
        det_index = {d.id: i for i, d in enumerate(dets)}
        for col, bits in enumerate(itertools.product(Mode, repeat=len(qs))):
            entries = {q.label: q.entry(m) for q, m in zip(qs, bits)}
            if any(e is None for e in entries.values()):
                continue
            for cfg, amp in evolve(graph, entries).items():
                if len(cfg) == 1 and cfg[0][1] in det_index:
                    response[det_index[cfg[0][1]], col] += amp
        kets = tuple(DetectorKet(d.label, response[i].conj()) for i, d in enumerate(dets))
        out.append(Measurement(st, tuple(q.label for q in qs), kets, graph.station_rank(st)))
    return out


def single_qubit_measurement_ket(R: float, phase: float, label: str = "") -> DetectorKet:
    """``sqrt(R)|0> + i exp(-i phase) sqrt(1-R)|1>``: the reflected-solid, transmitted-dashed arm."""
    if not (math.isfinite(R) and 0 <= R <= 1) or not math.isfinite(phase):
        raise BadCoefficients(f"reflectivity {R!r} outside [0, 1]")
    return DetectorKet(label, [math.sqrt(R), 1j * np.exp(-1j * phase) * math.sqrt(1 - R)])


def born_joint(state: StateVector, kets: Sequence[DetectorKet], qubits: Sequence[Sequence[str]] | None = None) -> float:
    """``|<psi| (k_1 (x) k_2 (x) ...)>|^2``.

    Without ``qubits`` the kets must follow the state's own qubit order;
    with it, ``qubits[i]`` names the qubits ket ``i`` acts on.
    """
    if qubits is not None:
        order = [q for group in qubits for q in group]
        for k, group in zip(kets, qubits):
            if k.n_qubits != len(group):
                raise DimensionMismatch(f"ket {k.label!r} acts on {k.n_qubits} qubits, given {len(group)}")
        state = state.permuted(order)
    product = np.ones(1, dtype=complex)
    for k in kets:
        product = np.kron(product, k.coefficients)
    if product.size != state.amplitudes.size:
        raise DimensionMismatch(f"kets span {product.size} dimensions, state has {state.amplitudes.size}")
    return float(abs(np.vdot(product, state.amplitudes)) ** 2)


def born_distribution(graph: ExperimentGraph) -> JointDistribution:
    state = prepare_state(graph)
    ms = station_measurements(graph)
    groups = [m.qubits for m in ms]
    return JointDistribution.from_function(
        [m.station for m in ms],
        [m.labels for m in ms],
        lambda oc: born_joint(state, [m.ket(lab) for m, lab in zip(ms, oc)], groups),
    )


# ---------------------------------------------------------------------------
# sequential Born rule + collapse

@dataclass
class CollapseNode:
    outcome: tuple[tuple[str, str], ...]
    conditional: float
    joint: float
    state: StateVector | None
    children: list["CollapseNode"] = field(default_factory=list)

    def leaves(self) -> Iterator["CollapseNode"]:
        if not self.children:
            yield self
        for c in self.children:
            yield from c.leaves()

    def leaf_joints(self) -> dict[frozenset, float]:
        """Joint probability of every full outcome, keyed by ``frozenset({(station, label), ...})``."""
        return {frozenset(leaf.outcome): leaf.joint for leaf in self.leaves()}


def _check_basis(m: Measurement) -> None:
    dim = 2 ** len(m.qubits)
    if len(m.kets) != dim or any(k.coefficients.size != dim for k in m.kets):
        raise IncompleteBasis(f"station {m.station}: {len(m.kets)} kets for a {dim}-dimensional space")
    res = gram_residual(m.kets)
    if res > GRAM_TOL:
        raise IncompleteBasis(f"station {m.station}: Gram residual {res:.3g}")


def collapse(state: StateVector, qubits: Sequence[str], ket: DetectorKet) -> tuple[float, StateVector | None]:
    """Born probability of ``ket`` on ``qubits`` and the normalized post-measurement state of the rest."""
    rest = [q for q in state.qubits if q not in qubits]
    t = state.permuted(list(qubits) + rest).amplitudes.reshape(2 ** len(qubits), -1)
    remaining = ket.coefficients.conj() @ t
    p = float(np.vdot(remaining, remaining).real)
    if p <= 0.0:
        return 0.0, None
    return p, StateVector(remaining / math.sqrt(p), tuple(rest))


def sequential_collapse(state: StateVector, measurements: Sequence[Measurement], check_order: bool = True) -> CollapseNode:
    """Apply measurements one after another, branching on every outcome."""
    if check_order:
        ranks = [m.time_rank for m in measurements if m.time_rank is not None]
        if any(a > b for a, b in zip(ranks, ranks[1:])):
            raise OrderMismatch(f"measurement order {[m.station for m in measurements]} contradicts time ranks {ranks}")
    for m in measurements:
        _check_basis(m)

    root = CollapseNode((), 1.0, 1.0, state)

    def grow(node: CollapseNode, i: int) -> None:
        if i == len(measurements) or node.state is None:
            return
        m = measurements[i]
        for k in m.kets:
            p, post = collapse(node.state, m.qubits, k)
            child = CollapseNode(node.outcome + ((m.station, k.label),), p, node.joint * p, post)
            node.children.append(child)
            grow(child, i + 1)

    grow(root, 0)
    return root


def collapse_tree(graph: ExperimentGraph, order: Sequence[str] | None = None, check_order: bool = True) -> CollapseNode:
    """Sequential-collapse tree for a graph, in time-rank order unless ``order`` is given."""
    ms = {m.station: m for m in station_measurements(graph)}
    if order is None:
        order = sorted(ms, key=lambda s: ms[s].time_rank)
    return sequential_collapse(prepare_state(graph), [ms[s] for s in order], check_order)


# ---------------------------------------------------------------------------
# engine comparison

@dataclass(frozen=True)
class EquivalenceRow:
    outcome: dict
    p_path_integral: float
    p_born: float

    @property
    def diff(self) -> float:
        return abs(self.p_path_integral - self.p_born)


@dataclass(frozen=True)
class EquivalenceReport:
    rows: tuple[EquivalenceRow, ...]
    tol: float = 1e-9

    @property
    def max_diff(self) -> float:
        return max((r.diff for r in self.rows), default=0.0)

    @property
    def ok(self) -> bool:
        return self.max_diff <= self.tol

    def to_json(self) -> list[dict]:
        return [
            {"outcome": r.outcome, "p_path_integral": r.p_path_integral, "p_born": r.p_born, "diff": r.diff}
            for r in self.rows
        ]

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def compare_engines(graph: ExperimentGraph, tol: float = 1e-9) -> EquivalenceReport:
    paths = joint_distribution(graph)
    born = born_distribution(graph)
    rows = tuple(
        EquivalenceRow(paths.as_dict(oc), p, born[paths.as_dict(oc)]) for oc, p in paths.items()
    )
    return EquivalenceReport(rows, tol)
