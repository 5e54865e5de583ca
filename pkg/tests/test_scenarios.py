import math

import numpy as np
import pytest

from whichway import scenarios
from whichway.errors import BadParams
from whichway.probability import ZERO_TOL, joint_distribution
from whichway.scenarios import PARAMETERS, SCENARIOS, ScenarioParams, build
from whichway.statevector import compare_engines

SWEEP = np.linspace(-math.pi, math.pi, 5)


class TestFigure1:
    def test_no_reflection_anticorrelates(self):
        d = joint_distribution(scenarios.figure1(0.0, 0.0))
        support = {oc: p for oc, p in d.items() if p > ZERO_TOL}
        assert support == {("a", "d"): pytest.approx(0.5), ("b", "c"): pytest.approx(0.5)}

    def test_stations(self):
        g = scenarios.figure1()
        assert g.station_names == ("left", "right")
        assert g.station_labels("left") == ("a", "b")

    @pytest.mark.parametrize("R", [1.2, -0.1, math.inf])
    def test_bad_reflectivity(self, R):
        with pytest.raises(BadParams):
            scenarios.figure1(R1=R)


class TestSwap:
    @pytest.mark.parametrize("alpha", SWEEP)
    def test_phi_plus_01(self, alpha):
        beta = 0.4
        d = joint_distribution(scenarios.entanglement_swapping(alpha, beta))
        expect = abs(np.exp(1j * (alpha + beta)) + 1) ** 2 / 32
        assert d.p(C="Phi+", A="0", B="1") == pytest.approx(expect, abs=1e-12)

    def test_zero_phase_forbids_equal_wings(self):
        d = joint_distribution(scenarios.entanglement_swapping(0.0, 0.0))
        assert d.p(C="Phi+", A="0", B="0") < 1e-30

    def test_time_ranks(self):
        es, dc = scenarios.entanglement_swapping(), scenarios.dces()
        assert es.station_rank("C") < es.station_rank("A") == es.station_rank("B")
        assert dc.station_rank("C") > dc.station_rank("A") == dc.station_rank("B")

    def test_blank_angle(self):
        with pytest.raises(BadParams):
            scenarios.dces(math.nan, 0.0)


class TestTriangle:
    @pytest.mark.parametrize("u", [0.15, 0.5, 0.9])
    def test_rotation_invariance(self, u):
        d = joint_distribution(scenarios.triangle(u))
        for oc in d.outcomes():
            rot = (oc[2], oc[0], oc[1])
            assert d[rot] == pytest.approx(d[oc], abs=1e-14)

    @pytest.mark.parametrize("u", [-0.1, 1.01])
    def test_bad_u(self, u):
        with pytest.raises(BadParams):
            scenarios.triangle(u)


class TestRegistry:
    def test_names(self):
        assert set(SCENARIOS) == set(PARAMETERS) == {"figure1", "swap", "dces", "triangle"}

    def test_unknown_scenario(self):
        with pytest.raises(BadParams):
            build("square")

    def test_extra_parameter(self):
        with pytest.raises(BadParams):
            build("triangle", alpha=1.0)

    def test_params_object(self):
        g = ScenarioParams("swap", {"alpha": 0.2}).build()
        assert set(g.station_names) == {"A", "B", "C"}


class TestEngineSweeps:
    @pytest.mark.parametrize("name,param", [(n, p) for n, ps in PARAMETERS.items() for p in ps])
    def test_sweep(self, name, param):
        if param in ("R1", "R2", "u"):
            values = np.linspace(0.0, 1.0, 5)
        else:
            values = SWEEP
        for x in values:
            assert compare_engines(build(name, **{param: float(x)})).max_diff < 1e-9
