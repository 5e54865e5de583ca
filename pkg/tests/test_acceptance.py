"""Acceptance criteria AC01-AC12; each test reports one PASS/FAIL line in the terminal summary."""
import itertools
import time

import numpy as np
import pytest

from _fuzz import corpus
from whichway import dsl, scenarios
from whichway.errors import GraphError, ParseError
from whichway.geometry import isomorphic
from whichway.histories import enumerate_histories, group_by_outcome
from whichway.measurement_basis import InterferometerConfig, detector_kets, interferometer_graph, INPUTS, DETECTORS
from whichway.probability import condition, joint_distribution, marginalize
from whichway.statevector import collapse_tree, compare_engines, gram_residual

SEED = 20240611
U_VALUES = (0.1, 0.35, 0.6, 0.8, 0.95)


def _v(u):
    return np.sqrt(1 - u * u)


def _swap_closed_forms(alpha, beta):
    e = np.exp(1j * (alpha + beta))
    minus, plus = abs(e - 1) ** 2 / 32, abs(e + 1) ** 2 / 32
    return {("0", "0"): minus, ("0", "1"): plus, ("1", "0"): plus, ("1", "1"): minus}


def _figure1_samples(n=25):
    rng = np.random.default_rng(SEED)
    return [tuple(rng.uniform(0, 1, 2)) + tuple(rng.uniform(-np.pi, np.pi, 3)) for _ in range(n)]


def _angle_samples(n=10):
    rng = np.random.default_rng(SEED + 1)
    return [tuple(rng.uniform(-np.pi, np.pi, 2)) for _ in range(n)]


def _rotations(word):
    return {word, word[-1] + word[:-1], word[-2:] + word[:-2]}


TWO_HISTORY = {
    "WWZ": lambda u, v: u**2 * v**2 * (u + v) ** 2 / 8,
    "WWW": lambda u, v: abs(u**3 - v**3) ** 2 / 8,
    "ZZZ": lambda u, v: (u**3 + v**3) ** 2 / 8,
    "WZZ": lambda u, v: u**2 * v**2 * (u - v) ** 2 / 8,
}
ONE_HISTORY = {
    "WXY": lambda u, v: v**2 / 8,
    "WYX": lambda u, v: u**2 / 8,
    "ZXY": lambda u, v: u**2 / 8,
    "ZYX": lambda u, v: v**2 / 8,
}


@pytest.mark.criterion("AC01", "figure1 path engine = |E1+E2|^2 = Born")
def test_ac01_figure1_equivalence(record_property):
    worst = 0.0
    for R1, R2, alpha, gamma, delta in _figure1_samples():
        T1, T2 = 1 - R1, 1 - R2
        p_paths = joint_distribution(scenarios.figure1(R1, R2, alpha, gamma, delta)).p(left="a", right="d")
        e1 = (1 / np.sqrt(2)) * (1j * np.sqrt(R1)) * (np.exp(1j * alpha) * 1j * np.sqrt(R2))
        e2 = (1 / np.sqrt(2)) * (np.exp(1j * delta) * np.sqrt(T1)) * (np.exp(1j * gamma) * np.sqrt(T2))
        p_closed = abs(e1 + e2) ** 2
        psi = np.array([np.exp(1j * alpha), 0, 0, 1]) / np.sqrt(2)
        ket_a = np.array([np.sqrt(R1), 1j * np.exp(-1j * delta) * np.sqrt(T1)])
        ket_d = np.array([np.sqrt(R2), 1j * np.exp(-1j * gamma) * np.sqrt(T2)])
        p_born = abs(np.vdot(psi, np.kron(ket_a, ket_d))) ** 2
        worst = max(worst, abs(p_paths - p_closed), abs(p_paths - p_born))
    record_property("detail", f"25 tuples, max diff {worst:.2e}")
    assert worst < 1e-9


@pytest.mark.criterion("AC02", "swap joint table matches the four closed forms, sums to 1")
def test_ac02_swap_joint_table(record_property):
    worst, worst_total = 0.0, 0.0
    for alpha, beta in _angle_samples():
        dist = joint_distribution(scenarios.entanglement_swapping(alpha, beta))
        for (a, b), p in _swap_closed_forms(alpha, beta).items():
            worst = max(worst, abs(dist.p(C="Phi+", A=a, B=b) - p))
        assert len(dist) == 16
        worst_total = max(worst_total, abs(dist.total() - 1))
    record_property("detail", f"max diff {worst:.2e}, max |total-1| {worst_total:.2e}")
    assert worst < 1e-9 and worst_total < 1e-9


@pytest.mark.criterion("AC03", "conditioning on C=Phi+ gives 4x the closed forms")
def test_ac03_conditioning(record_property):
    worst = 0.0
    for alpha, beta in _angle_samples():
        cond = condition(joint_distribution(scenarios.entanglement_swapping(alpha, beta)), {"C": "Phi+"})
        for (a, b), p in _swap_closed_forms(alpha, beta).items():
            worst = max(worst, abs(cond.p(C="Phi+", A=a, B=b) - 4 * p))
        assert all(p == 0.0 for oc, p in cond.items() if oc[0] != "Phi+")
    record_property("detail", f"max diff {worst:.2e}")
    assert worst < 1e-12


@pytest.mark.criterion("AC04", "DCES = ES entrywise; collapse order does not change leaf joints")
def test_ac04_dces_equals_es(record_property):
    worst_paths, worst_collapse = 0.0, 0.0
    for alpha, beta in _angle_samples():
        es = joint_distribution(scenarios.entanglement_swapping(alpha, beta))
        dc = joint_distribution(scenarios.dces(alpha, beta))
        assert es.stations == dc.stations
        worst_paths = max(worst_paths, max(abs(es[oc] - dc[oc]) for oc in es.outcomes()))
        center_first = collapse_tree(scenarios.entanglement_swapping(alpha, beta)).leaf_joints()
        wings_first = collapse_tree(scenarios.dces(alpha, beta)).leaf_joints()
        assert set(center_first) == set(wings_first)
        worst_collapse = max(worst_collapse, max(abs(center_first[k] - wings_first[k]) for k in center_first))
    record_property("detail", f"paths {worst_paths:.2e}, collapse {worst_collapse:.2e}")
    assert worst_paths < 1e-12 and worst_collapse < 1e-9


@pytest.mark.criterion("AC05", "marginal P(A,B) = 1/4 after summing out the center")
def test_ac05_no_signaling_marginal(record_property):
    worst = 0.0
    for alpha, beta in _angle_samples():
        for ctor in (scenarios.entanglement_swapping, scenarios.dces):
            m = marginalize(joint_distribution(ctor(alpha, beta)), ("A", "B"))
            assert len(m) == 4
            worst = max(worst, max(abs(p - 0.25) for _, p in m.items()))
    record_property("detail", f"max deviation {worst:.2e}")
    assert worst < 1e-9


@pytest.mark.criterion("AC06", "triangle two-history outcomes")
def test_ac06_triangle_two_history(record_property):
    worst = 0.0
    for u in U_VALUES:
        dist = joint_distribution(scenarios.triangle(u))
        for word, f in TWO_HISTORY.items():
            worst = max(worst, abs(dist[tuple(word)] - f(u, _v(u))))
    record_property("detail", f"5 values of u, max diff {worst:.2e}")
    assert worst < 1e-9


@pytest.mark.criterion("AC07", "triangle one-history outcomes and rotations")
def test_ac07_triangle_one_history(record_property):
    worst = 0.0
    for u in U_VALUES:
        dist = joint_distribution(scenarios.triangle(u))
        for word, f in ONE_HISTORY.items():
            for w in _rotations(word):
                worst = max(worst, abs(dist[tuple(w)] - f(u, _v(u))))
    record_property("detail", f"12 outcomes x 5 values of u, max diff {worst:.2e}")
    assert worst < 1e-9


@pytest.mark.criterion("AC08", "triangle forbidden outcomes have no history and p == 0")
def test_ac08_triangle_forbidden(record_property):
    permitted = set()
    for word in list(TWO_HISTORY) + list(ONE_HISTORY):
        permitted |= _rotations(word)
    n_forbidden = 0
    for u in U_VALUES:
        graph = scenarios.triangle(u)
        buckets = group_by_outcome(graph, enumerate_histories(graph))
        dist = joint_distribution(graph)
        for oc in itertools.product("WXYZ", repeat=3):
            word = "".join(oc)
            if word in permitted:
                assert len(buckets.get(oc, ())) in (1, 2), word
            else:
                assert oc not in buckets, word
                assert dist[oc] == 0.0, word
                n_forbidden += 1
    record_property("detail", f"{n_forbidden // len(U_VALUES)} forbidden outcomes per u")
    assert n_forbidden == 44 * len(U_VALUES)


@pytest.mark.criterion("AC09", "triangle normalization")
def test_ac09_triangle_normalization(record_property):
    worst = max(abs(joint_distribution(scenarios.triangle(u)).total() - 1) for u in U_VALUES)
    record_property("detail", f"max |total-1| {worst:.2e}")
    assert worst < 1e-9


@pytest.mark.criterion("AC10", "interferometer kets orthonormal; graph walk = closed form")
def test_ac10_interferometer_unitarity(record_property):
    rng = np.random.default_rng(SEED + 2)
    worst_gram, worst_walk = 0.0, 0.0
    for _ in range(50):
        cfg = InterferometerConfig.random(rng)
        kets = detector_kets(cfg)
        worst_gram = max(worst_gram, gram_residual(kets))
        for col, inject in enumerate(INPUTS):
            graph = interferometer_graph(cfg, inject)
            amps = {lab: 0j for lab in DETECTORS}
            for h in enumerate_histories(graph):
                (arrival,) = h.endpoints
                amps[arrival.label] += h.amplitude
            for k in kets:
                worst_walk = max(worst_walk, abs(amps[k.label] - k.coefficients[col]))
    record_property("detail", f"gram {worst_gram:.2e}, walk {worst_walk:.2e}")
    assert worst_gram < 1e-10 and worst_walk < 1e-12


@pytest.mark.criterion("AC11", "path engine = Born engine on every built-in sweep")
def test_ac11_global_oracle_equivalence(record_property):
    graphs = [scenarios.figure1(*t) for t in _figure1_samples()]
    for alpha, beta in _angle_samples():
        graphs += [scenarios.entanglement_swapping(alpha, beta), scenarios.dces(alpha, beta)]
    graphs += [scenarios.triangle(u) for u in U_VALUES]
    worst = max(compare_engines(g).max_diff for g in graphs)
    record_property("detail", f"{len(graphs)} graphs, max diff {worst:.2e}")
    assert worst < 1e-9


@pytest.mark.criterion("AC12", "parse/serialize fixed point; 10^4 fuzzed inputs give structured errors only")
def test_ac12_parser_robustness(record_property):
    seeds = []
    for name in scenarios.SCENARIOS:
        g = scenarios.build(name)
        text = dsl.serialize(g)
        again = dsl.loads(text)
        assert dsl.serialize(again) == text
        assert isomorphic(g, again)
        seeds.append(text)
    t0 = time.perf_counter()
    counts = {"ok": 0, "ParseError": 0, "GraphError": 0}
    crashes = []
    for text in corpus(seeds, 10_000, seed=SEED):
        try:
            g = dsl.loads(text)
        except (ParseError, GraphError) as exc:
            counts[type(exc).__name__] += 1
            continue
        except Exception as exc:  # anything else is a crash
            crashes.append((text, exc))
            continue
        counts["ok"] += 1
        assert dsl.serialize(dsl.loads(dsl.serialize(g))) == dsl.serialize(g)
    elapsed = time.perf_counter() - t0
    record_property("detail", f"{counts}, crashes {len(crashes)}, {elapsed:.1f}s")
    assert not crashes, crashes[:3]
