"""Built-in experiments.

Conventions shared by all constructors:

* A two-photon source uses ports 0, 1 for its solid pair and 2, 3 for its
  dashed pair; photon 0 travels on ports 0/2 and photon 1 on ports 1/3.
* Single-photon wings: the solid path enters ``in0`` of the wing
  beamsplitter and the dashed path enters ``in1``.  The detector on
  ``out1`` (solid reflected, dashed transmitted) is outcome ``0``.
* Joint two-photon stations place an SHG crystal ``x<ab>`` at each crossing
  of path ``a`` of the left photon with path ``b`` of the right photon.  The
  left photon always enters ``in0``.  Unconverted photons continue along
  the ``thru`` ports to the next crossing on their path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import BadParams
from .geometry import Beamsplitter, Detector, ExperimentGraph, GraphBuilder, Mirror, Mode, PhasePlate, SHGCrystal, Source

HALF_PI = math.pi / 2


def _check_real(name, x, lo=None, hi=None):
    if not isinstance(x, (int, float)) or not math.isfinite(x):
        raise BadParams(f"{name}={x!r} is not a finite number")
    if (lo is not None and x < lo) or (hi is not None and x > hi):
        raise BadParams(f"{name}={x!r} outside [{lo}, {hi}]")


def _pair_wiring(b: GraphBuilder, sid: str, to0_solid: str, to1_solid: str, to0_dashed: str, to1_dashed: str):
    b.connect(f"{sid}.0", to0_solid, Mode.SOLID)
    b.connect(f"{sid}.1", to1_solid, Mode.SOLID)
    b.connect(f"{sid}.2", to0_dashed, Mode.DASHED)
    b.connect(f"{sid}.3", to1_dashed, Mode.DASHED)


def _crossings(b: GraphBuilder, prefix: str):
    """Four crystals ``<prefix>x00 .. x11``; returns the entry port of each incoming path.

    Left photon: path 0 meets x00 then x01, path 1 meets x10 then x11.
    Right photon: path 0 meets x00 then x10, path 1 meets x01 then x11.
    """
    x = {ab: f"{prefix}x{ab}" for ab in ("00", "01", "10", "11")}
    for name in x.values():
        b.add(SHGCrystal(name))
    b.connect(f"{x['00']}.thru0", f"{x['01']}.in0")
    b.connect(f"{x['10']}.thru0", f"{x['11']}.in0")
    b.connect(f"{x['00']}.thru1", f"{x['10']}.in1")
    b.connect(f"{x['01']}.thru1", f"{x['11']}.in1")
    entries = {
        ("L", 0): f"{x['00']}.in0",
        ("L", 1): f"{x['10']}.in0",
        ("R", 0): f"{x['00']}.in1",
        ("R", 1): f"{x['01']}.in1",
    }
    return x, entries


def figure1(R1: float = 0.5, R2: float = 0.5, alpha: float = 0.0, gamma: float = 0.0, delta: float = 0.0,
            ) -> ExperimentGraph:
    """One entangled pair measured photon by photon.

    Left photon: solid -> ``bs1.in0``; dashed -> mirror -> ``delta`` -> ``bs1.in1``.
    Right photon: solid -> ``alpha`` -> ``bs2.in0``; dashed -> mirror -> ``gamma`` -> ``bs2.in1``.
    Detectors ``a = bs1.out1``, ``b = bs1.out0`` (station ``left``) and
    ``d = bs2.out1``, ``c = bs2.out0`` (station ``right``).
    """
    for name, x in (("R1", R1), ("R2", R2)):
        _check_real(name, x, 0.0, 1.0)
    for name, x in (("alpha", alpha), ("gamma", gamma), ("delta", delta)):
        _check_real(name, x)
    b = GraphBuilder()
    b.add(Source("s"))
    b.add(Beamsplitter("bs1", R1))
    b.add(Beamsplitter("bs2", R2))
    b.add(PhasePlate("alpha", alpha))
    b.add(PhasePlate("gamma", gamma))
    b.add(PhasePlate("delta", delta))
    b.add(Mirror("m1"))
    b.add(Mirror("m2"))
    for lab, st in (("a", "left"), ("b", "left"), ("c", "right"), ("d", "right")):
        b.add(Detector(lab, station=st))
    _pair_wiring(b, "s", "bs1.in0", "alpha.in", "m1.in", "m2.in")
    b.connect("m1.out", "delta.in")
    b.connect("delta.out", "bs1.in1")
    b.connect("alpha.out", "bs2.in0")
    b.connect("m2.out", "gamma.in")
    b.connect("gamma.out", "bs2.in1")
    b.connect("bs1.out1", "a.in")
    b.connect("bs1.out0", "b.in")
    b.connect("bs2.out0", "c.in")
    b.connect("bs2.out1", "d.in")
    return b.build()


def _swap_graph(alpha: float, beta: float, center_rank: int, wing_rank: int) -> ExperimentGraph:
    _check_real("alpha", alpha)
    _check_real("beta", beta)
    b = GraphBuilder()
    b.add(Source("sL"))
    b.add(Source("sR"))
    x, entry = _crossings(b, "c")
    # central Bell device: x11 and x10 outputs pass a pi/2 plate first
    b.add(PhasePlate("q11", HALF_PI))
    b.add(PhasePlate("q10", HALF_PI))
    b.add(Beamsplitter("bsPhi", 0.5))
    b.add(Beamsplitter("bsPsi", 0.5))
    b.connect(f"{x['00']}.out", "bsPhi.in0")
    b.connect(f"{x['11']}.out", "q11.in")
    b.connect("q11.out", "bsPhi.in1")
    b.connect(f"{x['01']}.out", "bsPsi.in0")
    b.connect(f"{x['10']}.out", "q10.in")
    b.connect("q10.out", "bsPsi.in1")
    # wings
    b.add(PhasePlate("alpha", alpha))
    b.add(PhasePlate("beta", beta))
    b.add(Beamsplitter("bsA", 0.5))
    b.add(Beamsplitter("bsB", 0.5))
    b.connect("alpha.out", "bsA.in1")
    b.connect("beta.out", "bsB.in1")
    for lab, port in (("Phi+", "bsPhi.out1"), ("Phi-", "bsPhi.out0"), ("Psi+", "bsPsi.out1"), ("Psi-", "bsPsi.out0")):
        b.add(Detector(f"C{lab}", station="C", label=lab, time_rank=center_rank))
        b.connect(port, f"C{lab}.in")
    for side in ("A", "B"):
        for lab, port in (("0", "out1"), ("1", "out0")):
            b.add(Detector(f"{side}{lab}", station=side, label=lab, time_rank=wing_rank))
            b.connect(f"bs{side}.{port}", f"{side}{lab}.in")
    # left source: photon 0 to Alice, photon 1 to the center (left input)
    b.connect("sL.0", "bsA.in0", Mode.SOLID)
    b.connect("sL.1", entry[("L", 0)], Mode.SOLID)
    b.connect("sL.2", "alpha.in", Mode.DASHED)
    b.connect("sL.3", entry[("L", 1)], Mode.DASHED)
    # right source: photon 0 to the center (right input), photon 1 to Bob
    b.connect("sR.0", entry[("R", 0)], Mode.SOLID)
    b.connect("sR.1", "bsB.in0", Mode.SOLID)
    b.connect("sR.2", entry[("R", 1)], Mode.DASHED)
    b.connect("sR.3", "beta.in", Mode.DASHED)
    return b.build()


def entanglement_swapping(alpha: float = 0.0, beta: float = 0.0) -> ExperimentGraph:
    """Two pairs, a Bell measurement on the inner photons (station C) before the wings A and B.

    The Bell device sends ``x00`` to ``bsPhi.in0`` and ``x11`` through a
    pi/2 plate to ``bsPhi.in1``; ``x01``/``x10`` likewise feed
    ``bsPsi``.  ``out1`` of each is the ``+`` state, ``out0`` the ``-`` state.
    The adjustable wing phases sit on the dashed paths.
    """
    return _swap_graph(alpha, beta, center_rank=1, wing_rank=2)


def dces(alpha: float = 0.0, beta: float = 0.0) -> ExperimentGraph:
    """Same optics as :func:`entanglement_swapping`, with the wings measured before the center."""
    return _swap_graph(alpha, beta, center_rank=2, wing_rank=1)


def triangle(u: float = 1 / math.sqrt(2)) -> ExperimentGraph:
    """Three sources on the sides of a triangle, joint stations A, B, C at its corners.

    Source ``sAB`` sends photon 0 to A and photon 1 to B (likewise ``sBC``,
    ``sCA``).  Seen from a station, the left photon comes from the previous
    side: A = (sCA, sAB), B = (sAB, sBC), C = (sBC, sCA).  In each station
    ``x00`` passes a pi/2 plate into ``in0`` of a splitter with
    ``sqrt(T) = u``, ``x11`` enters ``in1``; ``out1`` is W and ``out0`` is Z.
    ``x01`` fires X and ``x10`` fires Y directly.
    """
    _check_real("u", u, 0.0, 1.0)
    b = GraphBuilder()
    for sid in ("sAB", "sBC", "sCA"):
        b.add(Source(sid))
    entries = {}
    for st in ("A", "B", "C"):
        x, entry = _crossings(b, st)
        entries[st] = entry
        b.add(PhasePlate(f"{st}q", HALF_PI))
        b.add(Beamsplitter(f"{st}bs", 1 - u * u, u * u))
        b.connect(f"{x['00']}.out", f"{st}q.in")
        b.connect(f"{st}q.out", f"{st}bs.in0")
        b.connect(f"{x['11']}.out", f"{st}bs.in1")
        for lab, port in (("W", f"{st}bs.out1"), ("Z", f"{st}bs.out0"), ("X", f"{x['01']}.out"), ("Y", f"{x['10']}.out")):
            b.add(Detector(f"{st}{lab}", station=st, label=lab))
        b.connect(f"{st}bs.out1", f"{st}W.in")
        b.connect(f"{st}bs.out0", f"{st}Z.in")
        b.connect(f"{x['01']}.out", f"{st}X.in")
        b.connect(f"{x['10']}.out", f"{st}Y.in")
    # (source, station it feeds with photon 0, station for photon 1)
    for sid, first, second in (("sAB", "A", "B"), ("sBC", "B", "C"), ("sCA", "C", "A")):
        # photon 0 is the right-hand photon at ``first``, photon 1 the left-hand photon at ``second``
        b.connect(f"{sid}.0", entries[first][("R", 0)], Mode.SOLID)
        b.connect(f"{sid}.1", entries[second][("L", 0)], Mode.SOLID)
        b.connect(f"{sid}.2", entries[first][("R", 1)], Mode.DASHED)
        b.connect(f"{sid}.3", entries[second][("L", 1)], Mode.DASHED)
    return b.build()


@dataclass(frozen=True)
class ScenarioParams:
    scenario: str
    params: dict = field(default_factory=dict)

    def build(self) -> ExperimentGraph:
        return build(self.scenario, **self.params)


SCENARIOS = {
    "figure1": figure1,
    "swap": entanglement_swapping,
    "dces": dces,
    "triangle": triangle,
}

PARAMETERS = {
    "figure1": ("R1", "R2", "alpha", "gamma", "delta"),
    "swap": ("alpha", "beta"),
    "dces": ("alpha", "beta"),
    "triangle": ("u",),
}


def build(name: str, **params) -> ExperimentGraph:
    try:
        ctor = SCENARIOS[name]
    except KeyError:
        raise BadParams(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}") from None
    extra = set(params) - set(PARAMETERS[name])
    if extra:
        raise BadParams(f"{name} does not take {sorted(extra)}")
    return ctor(**params)
