import cmath
import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from whichway import scenarios
from whichway.errors import DimensionMismatch, IncompleteBasis, OrderMismatch
from whichway.measurement_basis import bell_basis, wz_basis
from whichway.statevector import (
    DetectorKet,
    Measurement,
    StateVector,
    born_distribution,
    born_joint,
    collapse,
    collapse_tree,
    compare_engines,
    prepare_state,
    sequential_collapse,
    single_qubit_measurement_ket,
    station_measurements,
)

H = 1 / math.sqrt(2)


def same_up_to_phase(a, b, tol=1e-12):
    a, b = np.asarray(a, complex), np.asarray(b, complex)
    overlap = np.vdot(b, a)
    if abs(overlap) < tol:
        return np.allclose(a, 0, atol=tol) and np.allclose(b, 0, atol=tol)
    return np.allclose(a, overlap / abs(overlap) * b, atol=tol)


# wing photons (sL.0, sR.1) after the center projects on Phi+
PSI_INT = np.array([H, 0, 0, H])


class TestPrepare:
    def test_figure1_pair(self):
        psi = prepare_state(scenarios.figure1())
        assert psi.qubits == ("s.0", "s.1")
        np.testing.assert_allclose(psi.amplitudes, [H, 0, 0, H], atol=1e-15)

    def test_two_pairs(self):
        psi = prepare_state(scenarios.entanglement_swapping())
        assert psi.qubits == ("sL.0", "sL.1", "sR.0", "sR.1")
        np.testing.assert_allclose(psi.amplitudes, np.kron([H, 0, 0, H], [H, 0, 0, H]), atol=1e-15)

    def test_triangle_dimension(self):
        assert prepare_state(scenarios.triangle(0.3)).amplitudes.size == 64

    def test_permuted_roundtrip(self):
        psi = StateVector(np.arange(8) + 1j, ("a", "b", "c"))
        back = psi.permuted(("c", "a", "b")).permuted(("a", "b", "c"))
        np.testing.assert_array_equal(back.amplitudes, psi.amplitudes)
        assert psi.permuted(("b", "a", "c")).amplitude("100") == psi.amplitude("010")

    def test_bad_size(self):
        with pytest.raises(DimensionMismatch):
            StateVector([1, 0, 0], ("a", "b"))


class TestKets:
    def test_single_qubit_limits(self):
        np.testing.assert_allclose(single_qubit_measurement_ket(1.0, 0.3).coefficients, [1, 0])
        np.testing.assert_allclose(single_qubit_measurement_ket(0.0, 0.0).coefficients, [0, 1j])

    def test_single_qubit_normalized(self):
        assert single_qubit_measurement_ket(0.37, 2.0).norm() == pytest.approx(1.0)

    def test_not_a_register(self):
        with pytest.raises(DimensionMismatch):
            DetectorKet("x", [1, 0, 0])

    def test_swap_center_station(self):
        ms = {m.station: m for m in station_measurements(scenarios.entanglement_swapping())}
        c = ms["C"]
        assert c.qubits == ("sL.1", "sR.0")
        expected = dict(zip(("Psi+", "Psi-", "Phi+", "Phi-"), bell_basis()))
        for lab in c.labels:
            assert same_up_to_phase(c.ket(lab).coefficients, expected[lab].coefficients), lab

    @pytest.mark.parametrize("u", [0.1, 0.6, 0.95])
    def test_triangle_station_basis(self, u):
        ref = {k.label: k.coefficients for k in wz_basis(u)}
        for m in station_measurements(scenarios.triangle(u)):
            for k in m.kets:
                assert same_up_to_phase(k.coefficients, ref[k.label]), (m.station, k.label)


class TestBornJoint:
    def test_product_state(self):
        psi = StateVector([1, 0, 0, 0], ("a", "b"))
        k0 = DetectorKet("0", [1, 0])
        assert born_joint(psi, [k0, k0]) == 1.0

    @settings(max_examples=20, deadline=None)
    @given(st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi))
    def test_wing_projection(self, alpha, beta):
        psi = StateVector(PSI_INT, ("a", "b"))
        ket = single_qubit_measurement_ket(0.5, alpha, "0")
        ket_b = single_qubit_measurement_ket(0.5, beta, "0")
        p = born_joint(psi, [ket, ket_b])
        assert p == pytest.approx(abs(cmath.exp(1j * (alpha + beta)) - 1) ** 2 / 8, abs=1e-12)

    def test_complete_basis_sums_to_one(self):
        rng = np.random.default_rng(5)
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi = StateVector(v / np.linalg.norm(v), ("a", "b"))
        assert sum(born_joint(psi, [k]) for k in wz_basis(0.4)) == pytest.approx(1.0)

    def test_named_qubits(self):
        psi = StateVector(np.kron([0, 1], [1, 0]), ("a", "b"))
        k0, k1 = DetectorKet("0", [1, 0]), DetectorKet("1", [0, 1])
        assert born_joint(psi, [k0, k1], [("b",), ("a",)]) == 1.0

    def test_dimension_mismatch(self):
        psi = StateVector([1, 0, 0, 0], ("a", "b"))
        with pytest.raises(DimensionMismatch):
            born_joint(psi, [DetectorKet("0", [1, 0])])
        with pytest.raises(DimensionMismatch):
            born_joint(psi, [DetectorKet("00", [1, 0, 0, 0])], [("a",)])

    def test_bell_overlap_on_middle_qubits(self):
        alpha, beta = 0.4, -1.9
        psi = prepare_state(scenarios.entanglement_swapping(alpha, beta))
        phi = [k for k in bell_basis() if k.label == "Phi+"][0]
        ka, kb = single_qubit_measurement_ket(0.5, alpha), single_qubit_measurement_ket(0.5, beta)
        p = born_joint(psi, [ka, phi, kb], [("sL.0",), ("sL.1", "sR.0"), ("sR.1",)])
        assert p == pytest.approx(abs(cmath.exp(1j * (alpha + beta)) - 1) ** 2 / 32, abs=1e-12)


class TestCollapse:
    def test_center_first_leaves_wing_state(self):
        alpha, beta = 0.3, 1.2
        g = scenarios.entanglement_swapping(alpha, beta)
        ms = {m.station: m for m in station_measurements(g)}
        p, post = collapse(prepare_state(g), ms["C"].qubits, ms["C"].ket("Phi+"))
        assert p == pytest.approx(0.25)
        assert post.qubits == ("sL.0", "sR.1")
        assert same_up_to_phase(post.amplitudes, PSI_INT)

    def test_zero_branch(self):
        psi = StateVector([1, 0, 0, 0], ("a", "b"))
        assert collapse(psi, ("a",), DetectorKet("1", [0, 1])) == (0.0, None)

    def test_every_order_same_leaves(self):
        g = scenarios.triangle(0.7)
        def full(order):
            # a zero-probability branch stops early; its full outcomes have joint 0
            leaves = collapse_tree(g, order, check_order=False).leaf_joints()
            return {k: p for k, p in leaves.items() if len(k) == 3 and p > 1e-15}

        ref = full(("A", "B", "C"))
        assert len(ref) == 20
        for order in itertools.permutations("ABC"):
            got = full(order)
            assert set(got) == set(ref)
            assert max(abs(got[k] - ref[k]) for k in ref) < 1e-12

    def test_leaves_match_born(self):
        g = scenarios.dces(1.0, 0.5)
        born = born_distribution(g)
        for key, p in collapse_tree(g).leaf_joints().items():
            assert p == pytest.approx(born[dict(key)], abs=1e-12)

    def test_order_mismatch(self):
        with pytest.raises(OrderMismatch):
            collapse_tree(scenarios.entanglement_swapping(), ("A", "B", "C"))

    def test_incomplete_basis(self):
        psi = StateVector([1, 0, 0, 0], ("a", "b"))
        m = Measurement("M", ("a", "b"), tuple(bell_basis()[:3]))
        with pytest.raises(IncompleteBasis):
            sequential_collapse(psi, [m])

    def test_non_orthogonal_basis(self):
        psi = StateVector([1, 0], ("a",))
        m = Measurement("M", ("a",), (DetectorKet("0", [1, 0]), DetectorKet("1", [H, H])))
        with pytest.raises(IncompleteBasis):
            sequential_collapse(psi, [m])


class TestCompareEngines:
    @pytest.mark.parametrize("graph", [
        scenarios.entanglement_swapping(0.7, 1.3),
        scenarios.triangle(0.8),
        scenarios.figure1(0.3, 0.6, 0.5, 0.5, 0.5),
    ], ids=["swap", "triangle", "figure1"])
    def test_agree(self, graph):
        report = compare_engines(graph)
        assert report.ok and report.max_diff < 1e-12

    def test_json(self):
        doc = json.loads(compare_engines(scenarios.figure1()).dumps())
        assert len(doc) == 4
        assert set(doc[0]) == {"outcome", "p_path_integral", "p_born", "diff"}
