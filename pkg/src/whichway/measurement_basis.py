"""Two-qubit measurement bases: the four-splitter interferometer and named presets.

The interferometer takes a single second-harmonic photon on one of four
input paths, labelled by the two-photon state that produced it
(``00, 01, 10, 11``), and routes it to detectors A, B, C, D::

    |00> ---------------- BS1.in0     BS1.out0 (P) ------------- BS3.in1
    |01> --[phi1]-------- BS1.in1     BS1.out1 (Q) --[phi3]----- BS4.in0
    |10> --[phi2]-------- BS2.in0     BS2.out0 (S) --[phi4]----- BS3.in0
    |11> ---------------- BS2.in1     BS2.out1 (U) ------------- BS4.in1

    BS3.out0 -> A   BS3.out1 -> B   BS4.out0 -> C   BS4.out1 -> D

:func:`detector_kets` returns, for each detector, the amplitude with which
each input reaches it.  Those amplitudes are the closed forms, global phases included; the
Born-rule projector of a detector is their complex conjugate
(:meth:`DetectorKet.conj`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadCoefficients
from .geometry import Beamsplitter, Detector, ExperimentGraph, GraphBuilder, Mode, PhasePlate, Source
from .statevector import DetectorKet, gram_residual

INPUTS = ("00", "01", "10", "11")
DETECTORS = ("A", "B", "C", "D")


@dataclass(frozen=True)
class InterferometerConfig:
    phases: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    reflectivities: tuple[float, float, float, float] = (0.5, 0.5, 0.5, 0.5)

    def __post_init__(self):
        if len(self.phases) != 4 or len(self.reflectivities) != 4:
            raise BadCoefficients("need four phases and four reflectivities")
        for r in self.reflectivities:
            if not (math.isfinite(r) and 0.0 <= r <= 1.0):
                raise BadCoefficients(f"reflectivity {r!r} outside [0, 1]")
        if not all(math.isfinite(p) for p in self.phases):
            raise BadCoefficients("non-finite phase")
        object.__setattr__(self, "phases", tuple(float(p) for p in self.phases))
        object.__setattr__(self, "reflectivities", tuple(float(r) for r in self.reflectivities))

    @classmethod
    def random(cls, rng: np.random.Generator) -> "InterferometerConfig":
        return cls(tuple(rng.uniform(0, 2 * np.pi, 4)), tuple(rng.uniform(0, 1, 4)))


# Bell-basis setting: A, B, C, D respond as i*Phi+, Phi-, Psi-, i*Psi+.
BELL_CONFIG = InterferometerConfig((0.0, 0.0, 0.0, 0.0), (0.0, 1.0, 0.5, 0.5))


def detector_kets(cfg: InterferometerConfig) -> tuple[DetectorKet, ...]:
    """Closed-form response amplitudes of detectors A-D to the four inputs."""
    p1, p2, p3, p4 = cfg.phases
    R1, R2, R3, R4 = cfg.reflectivities
    T1, T2, T3, T4 = (1 - r for r in cfg.reflectivities)
    e = lambda x: np.exp(1j * x)  # noqa: E731
    s = math.sqrt
    A = [1j * s(T1 * R3), -e(p1) * s(R1 * R3), e(p2 + p4) * s(T2 * T3), 1j * e(p4) * s(R2 * T3)]
    B = [s(T1 * T3), 1j * e(p1) * s(R1 * T3), 1j * e(p2 + p4) * s(T2 * R3), -e(p4) * s(R2 * R3)]
    C = [1j * e(p3) * s(R1 * T4), e(p1 + p3) * s(T1 * T4), -e(p2) * s(R2 * R4), 1j * s(T2 * R4)]
    D = [-e(p3) * s(R1 * R4), 1j * e(p1 + p3) * s(T1 * R4), 1j * e(p2) * s(R2 * T4), s(T2 * T4)]
    return tuple(DetectorKet(lab, c) for lab, c in zip(DETECTORS, (A, B, C, D)))


def interferometer_graph(cfg: InterferometerConfig, inject: str) -> ExperimentGraph:
    """The interferometer as a graph, fed by a single photon on input ``inject``."""
    if inject not in INPUTS:
        raise ValueError(f"input must be one of {INPUTS}")
    p1, p2, p3, p4 = cfg.phases
    R1, R2, R3, R4 = cfg.reflectivities
    b = GraphBuilder()
    b.add(Source("src", branches=((Mode.SOLID, 1 + 0j), (Mode.DASHED, 0j))))
    for name, R in zip(("bs1", "bs2", "bs3", "bs4"), (R1, R2, R3, R4)):
        b.add(Beamsplitter(name, R))
    for name, phi in zip(("phi1", "phi2", "phi3", "phi4"), (p1, p2, p3, p4)):
        b.add(PhasePlate(name, phi))
    for lab in DETECTORS:
        b.add(Detector(f"det{lab}", station="D", label=lab))
    entry = {"00": "bs1.in0", "01": "phi1.in", "10": "phi2.in", "11": "bs2.in1"}
    b.connect("src.0", entry[inject], Mode.SOLID)
    b.connect("phi1.out", "bs1.in1")
    b.connect("phi2.out", "bs2.in0")
    b.connect("bs1.out0", "bs3.in1")
    b.connect("bs1.out1", "phi3.in")
    b.connect("phi3.out", "bs4.in0")
    b.connect("bs2.out0", "phi4.in")
    b.connect("phi4.out", "bs3.in0")
    b.connect("bs2.out1", "bs4.in1")
    b.connect("bs3.out0", "detA.in")
    b.connect("bs3.out1", "detB.in")
    b.connect("bs4.out0", "detC.in")
    b.connect("bs4.out1", "detD.in")
    return b.build()


def bell_basis() -> tuple[DetectorKet, ...]:
    """Psi+, Psi-, Phi+, Phi- on two qubits."""
    h = 1 / math.sqrt(2)
    return (
        DetectorKet("Psi+", [0, h, h, 0]),
        DetectorKet("Psi-", [0, h, -h, 0]),
        DetectorKet("Phi+", [h, 0, 0, h]),
        DetectorKet("Phi-", [h, 0, 0, -h]),
    )


def wz_basis(u: float) -> tuple[DetectorKet, ...]:
    """W = v|00> - u|11>, X = |01>, Y = |10>, Z = u|00> + v|11> with v = sqrt(1 - u^2)."""
    if not (math.isfinite(u) and 0.0 <= u <= 1.0):
        raise BadCoefficients(f"u={u!r} outside [0, 1]")
    v = math.sqrt(1 - u * u)
    return (
        DetectorKet("W", [v, 0, 0, -u]),
        DetectorKet("X", [0, 1, 0, 0]),
        DetectorKet("Y", [0, 0, 1, 0]),
        DetectorKet("Z", [u, 0, 0, v]),
    )


def input_completeness(kets) -> np.ndarray:
    """For each input, the total probability of reaching some detector."""
    K = np.array([k.coefficients for k in kets])
    return np.sum(np.abs(K) ** 2, axis=0)


__all__ = [
    "BELL_CONFIG",
    "DETECTORS",
    "INPUTS",
    "InterferometerConfig",
    "bell_basis",
    "detector_kets",
    "gram_residual",
    "input_completeness",
    "interferometer_graph",
    "wz_basis",
]
