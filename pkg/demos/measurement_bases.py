"""Two-qubit bases from the four-splitter interferometer.

The Bell preset, a random setting, and a check that walking the graph with
one injected photon gives the closed-form detector amplitudes.
"""
import numpy as np

from whichway import BELL_CONFIG, InterferometerConfig, detector_kets, enumerate_histories, gram_residual
from whichway.measurement_basis import INPUTS, interferometer_graph


def show(kets):
    for k in kets:
        c = np.round(k.coefficients, 3) + 0.0  # drop signed zeros
        cells = "  ".join(f"{x.real:+.3f}{x.imag:+.3f}i" for x in c)
        print(f"  {k.label}: {cells}")
    print(f"  gram residual {gram_residual(kets):.1e}")


print("Bell setting")
show(detector_kets(BELL_CONFIG))

cfg = InterferometerConfig.random(np.random.default_rng(7))
print("random setting")
kets = detector_kets(cfg)
show(kets)

worst = 0.0
for col, inject in enumerate(INPUTS):
    amps = {}
    for h in enumerate_histories(interferometer_graph(cfg, inject)):
        (arrival,) = h.endpoints
        amps[arrival.label] = amps.get(arrival.label, 0) + h.amplitude
    worst = max(worst, max(abs(amps.get(k.label, 0) - k.coefficients[col]) for k in kets))
print(f"graph walk vs closed form: {worst:.1e}")
