"""Joint outcome distributions from summed history amplitudes.

Conditioning and marginalization always work on a joint table; there is no
shortcut through an updated state.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import UnknownStation, ZeroProbabilityCondition
from .geometry import ExperimentGraph
from .histories import enumerate_histories, group_by_outcome

ZERO_TOL = 1e-12

Outcome = tuple[str, ...]


@dataclass(frozen=True)
class JointDistribution:
    """Probability of every outcome tuple; tuples are ordered like ``stations``."""

    stations: tuple[str, ...]
    labels: tuple[tuple[str, ...], ...]
    probabilities: Mapping[Outcome, float]

    @classmethod
    def from_function(cls, stations, labels, fn) -> "JointDistribution":
        space = itertools.product(*labels)
        return cls(tuple(stations), tuple(map(tuple, labels)), {oc: float(fn(oc)) for oc in space})

    def _key(self, outcome) -> Outcome:
        if isinstance(outcome, Mapping):
            unknown = set(outcome) - set(self.stations)
            if unknown:
                raise UnknownStation(sorted(unknown))
            return tuple(outcome[s] for s in self.stations)
        return tuple(outcome)

    def __getitem__(self, outcome) -> float:
        return self.probabilities[self._key(outcome)]

    def p(self, **outcome: str) -> float:
        return self[outcome]

    def __iter__(self):
        return iter(self.outcomes())

    def __len__(self) -> int:
        return len(self.probabilities)

    def outcomes(self) -> list[Outcome]:
        """Outcome tuples in lexicographic order."""
        return sorted(self.probabilities)

    def items(self) -> list[tuple[Outcome, float]]:
        return [(oc, self.probabilities[oc]) for oc in self.outcomes()]

    def total(self) -> float:
        return float(sum(self.probabilities.values()))

    def as_dict(self, outcome: Outcome) -> dict[str, str]:
        return dict(zip(self.stations, outcome))

    def forbidden(self, tol: float = ZERO_TOL) -> list[Outcome]:
        return [oc for oc, p in self.items() if abs(p) <= tol]

    def to_json(self) -> list[dict]:
        return [{"outcome": self.as_dict(oc), "probability": p} for oc, p in self.items()]

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _amplitude_sum(histories) -> complex:
    total = 0j
    for h in sorted(histories, key=lambda h: h.key):
        total += h.amplitude
    return total


def joint_distribution(graph: ExperimentGraph, histories=None) -> JointDistribution:
    """Sum-and-square every outcome: ``P(o) = |sum of amplitudes of histories ending in o|^2``."""
    if histories is None:
        histories = enumerate_histories(graph)
    buckets = group_by_outcome(graph, histories)
    stations = graph.station_names
    labels = [graph.station_labels(s) for s in stations]
    return JointDistribution.from_function(
        stations, labels, lambda oc: abs(_amplitude_sum(buckets.get(oc, ()))) ** 2
    )


def condition(dist: JointDistribution, partial: Mapping[str, str]) -> JointDistribution:
    """Bayesian update on a partial outcome: zero the rest, renormalize the matches."""
    unknown = set(partial) - set(dist.stations)
    if unknown:
        raise UnknownStation(sorted(unknown))
    idx = {s: i for i, s in enumerate(dist.stations)}

    def keep(oc):
        return all(oc[idx[s]] == lab for s, lab in partial.items())

    mass = sum(p for oc, p in dist.probabilities.items() if keep(oc))
    if mass <= ZERO_TOL:
        raise ZeroProbabilityCondition(f"condition {dict(partial)} has probability {mass!r}")
    return JointDistribution(
        dist.stations, dist.labels,
        {oc: (p / mass if keep(oc) else 0.0) for oc, p in dist.probabilities.items()},
    )


def marginalize(dist: JointDistribution, keep: Iterable[str]) -> JointDistribution:
    """Sum out every station not in ``keep``; kept stations stay in their original order."""
    keep = set(keep)
    unknown = keep - set(dist.stations)
    if unknown:
        raise UnknownStation(sorted(unknown))
    positions = [i for i, s in enumerate(dist.stations) if s in keep]
    out: dict[Outcome, float] = {}
    for oc, p in dist.probabilities.items():
        k = tuple(oc[i] for i in positions)
        out[k] = out.get(k, 0.0) + p
    return JointDistribution(
        tuple(dist.stations[i] for i in positions), tuple(dist.labels[i] for i in positions), out
    )


@dataclass(frozen=True)
class CorrelationReport:
    stations: tuple[str, str]
    max_deviation: float
    independent: bool


def correlation_report(dist: JointDistribution, stations: Sequence[str], tol: float = 1e-9) -> CorrelationReport:
    """Largest ``|P(x,y) - P(x)P(y)|`` between two stations' outcomes."""
    a, b = stations
    pair = marginalize(dist, (a, b))
    if pair.stations != (a, b):
        pair = JointDistribution((a, b), pair.labels[::-1], {oc[::-1]: p for oc, p in pair.probabilities.items()})
    pa = marginalize(pair, (a,))
    pb = marginalize(pair, (b,))
    dev = max(
        (abs(p - pa[(x,)] * pb[(y,)]) for (x, y), p in pair.probabilities.items()),
        default=0.0,
    )
    return CorrelationReport((a, b), dev, dev <= tol)
