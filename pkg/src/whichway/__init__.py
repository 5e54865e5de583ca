"""Sum-over-histories simulator for which-way entangled photonic experiments.

Two independent engines compute joint detection probabilities: the path
engine sums history amplitudes per outcome, and the state-vector engine
applies the Born rule to a prepared multi-qubit state.
"""
from .dsl import load, loads, parse, serialize
from .errors import (
    BadCoefficients,
    BadParams,
    DimensionMismatch,
    GraphError,
    IncompleteBasis,
    InvalidGraph,
    NoBornRealization,
    OrderMismatch,
    ParseError,
    UnknownStation,
    WhichwayError,
    ZeroProbabilityCondition,
)
from .geometry import (
    Beamsplitter,
    Detector,
    ExperimentGraph,
    ExperimentSpec,
    GraphBuilder,
    Mirror,
    Mode,
    PhasePlate,
    Segment,
    SHGCrystal,
    Source,
    build_graph,
    isomorphic,
    validate,
)
from .goldens import GoldenCase, evaluate_golden, load_goldens
from .histories import History, enumerate_histories, group_by_outcome, history_amplitude
from .measurement_basis import BELL_CONFIG, InterferometerConfig, bell_basis, detector_kets, wz_basis
from .probability import JointDistribution, condition, correlation_report, joint_distribution, marginalize
from .scenarios import build, dces, entanglement_swapping, figure1, triangle
from .statevector import (
    DetectorKet,
    StateVector,
    born_distribution,
    born_joint,
    collapse,
    collapse_tree,
    compare_engines,
    gram_residual,
    prepare_state,
    sequential_collapse,
    station_measurements,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
