import math

import numpy as np
import pytest

from whichway.errors import BadCoefficients
from whichway.histories import enumerate_histories
from whichway.measurement_basis import (
    BELL_CONFIG,
    DETECTORS,
    INPUTS,
    InterferometerConfig,
    bell_basis,
    detector_kets,
    input_completeness,
    interferometer_graph,
    wz_basis,
)
from whichway.statevector import gram_residual

H = 1 / math.sqrt(2)


def walk(cfg, inject):
    amps = dict.fromkeys(DETECTORS, 0j)
    for h in enumerate_histories(interferometer_graph(cfg, inject)):
        (arrival,) = h.endpoints
        amps[arrival.label] += h.amplitude
    return amps


class TestInterferometer:
    @pytest.mark.parametrize("seed", range(10))
    def test_random_config_orthonormal(self, seed):
        kets = detector_kets(InterferometerConfig.random(np.random.default_rng(seed)))
        assert gram_residual(kets) < 1e-12
        np.testing.assert_allclose(input_completeness(kets), 1.0, atol=1e-12)

    def test_balanced_magnitudes(self):
        cfg = InterferometerConfig((0.3, 1.1, -0.4, 2.0))
        for k in detector_kets(cfg):
            np.testing.assert_allclose(np.abs(k.coefficients), 0.5, atol=1e-15)

    def test_full_reflection_support(self):
        kets = {k.label: k for k in detector_kets(InterferometerConfig(reflectivities=(1, 1, 0.5, 0.5)))}
        for lab in "AB":
            np.testing.assert_allclose(np.abs(kets[lab].coefficients[[0, 2]]), 0, atol=1e-15)

    def test_bell_preset(self):
        kets = {k.label: k.coefficients for k in detector_kets(BELL_CONFIG)}
        np.testing.assert_allclose(kets["A"], [1j * H, 0, 0, 1j * H], atol=1e-15)
        np.testing.assert_allclose(kets["B"], [H, 0, 0, -H], atol=1e-15)
        np.testing.assert_allclose(kets["C"], [0, H, -H, 0], atol=1e-15)
        np.testing.assert_allclose(kets["D"], [0, 1j * H, 1j * H, 0], atol=1e-15)

    @pytest.mark.parametrize("seed", range(5))
    def test_graph_walk(self, seed):
        cfg = InterferometerConfig.random(np.random.default_rng(100 + seed))
        kets = detector_kets(cfg)
        for col, inject in enumerate(INPUTS):
            amps = walk(cfg, inject)
            for k in kets:
                assert abs(amps[k.label] - k.coefficients[col]) < 1e-12

    def test_bad_reflectivity(self):
        with pytest.raises(BadCoefficients):
            InterferometerConfig(reflectivities=(0.5, 1.2, 0.5, 0.5))
        with pytest.raises(BadCoefficients):
            InterferometerConfig(phases=(0.0, math.nan, 0.0, 0.0))
        with pytest.raises(BadCoefficients):
            InterferometerConfig(phases=(0.0, 0.0))

    def test_unknown_input(self):
        with pytest.raises(ValueError):
            interferometer_graph(BELL_CONFIG, "02")


class TestPresets:
    def test_bell(self):
        kets = {k.label: k.coefficients for k in bell_basis()}
        np.testing.assert_allclose(kets["Phi+"], [H, 0, 0, H])
        assert abs(np.vdot(kets["Psi+"], kets["Psi-"])) < 1e-15
        assert gram_residual(bell_basis()) < 1e-15

    def test_wz_symmetric_point(self):
        kets = {k.label: k.coefficients for k in wz_basis(H)}
        np.testing.assert_allclose(kets["W"], [H, 0, 0, -H], atol=1e-15)
        np.testing.assert_allclose(kets["Z"], [H, 0, 0, H], atol=1e-15)

    def test_wz_product_limit(self):
        kets = {k.label: k.coefficients for k in wz_basis(1.0)}
        np.testing.assert_allclose(kets["W"], [0, 0, 0, -1])
        np.testing.assert_allclose(kets["Z"], [1, 0, 0, 0])

    @pytest.mark.parametrize("u", [0.0, 0.2, 0.5, 0.77, 1.0])
    def test_wz_orthonormal(self, u):
        assert gram_residual(wz_basis(u)) < 1e-15

    def test_wz_bad_u(self):
        with pytest.raises(BadCoefficients):
            wz_basis(1.5)
