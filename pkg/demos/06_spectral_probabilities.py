"""Energy measurement statistics of a packet, straight from the amplitudes.

Once a normalized packet is expanded over the continuum, the squared
amplitude integrated over an energy window is the probability that an
energy measurement lands there; the channel label splits the probability
by incidence side.  Both sign families must give the same numbers, since
they expand the same state.
"""

import math

import numpy as np

from barrierkets import (
    BarrierModel,
    GaussianPacket,
    QuadratureSpec,
    SignLabel,
    build_test_function,
    inner_product,
    spectral_probability,
)

model = BarrierModel()
spec = QuadratureSpec()

f = build_test_function(model, GaussianPacket(center=-20.0, width=1.0,
                                              momentum=3.0))
norm = math.sqrt(inner_product(f, f, spec).real)
f = f.scaled(1.0 / norm)

# A boost of +3 puts the mean energy near p^2 + spread effects; the windows
# hardly move it.  Integrate the spectral density over a few windows.
print("energy window probabilities, plus family")
windows = [(0.0, 4.0), (4.0, 8.0), (8.0, 12.0), (12.0, 16.0), (16.0, 25.0),
           (25.0, math.inf)]
total = 0.0
for lo, hi in windows:
    p = spectral_probability(f, lo, hi, SignLabel.PLUS, spec)
    total += p
    hi_label = "inf" if math.isinf(hi) else f"{hi:g}"
    print(f"  [{lo:5.1f}, {hi_label:>5}) -> {p:.6f}")
print(f"  sum             -> {total:.10f}")
print()

p_plus = spectral_probability(f, 0.0, math.inf, SignLabel.PLUS, spec)
p_minus = spectral_probability(f, 0.0, math.inf, SignLabel.MINUS, spec)
print(f"total, plus family:  {p_plus:.12f}")
print(f"total, minus family: {p_minus:.12f}")
print(f"difference:          {abs(p_plus - p_minus):.2e}")
print()

# details=True reports the truncation energy, the estimated tail beyond
# it, and the per-channel split.  The packet comes from the left, so the
# left-incidence channel carries almost all of the probability.
prob, info = spectral_probability(f, 0.0, math.inf, SignLabel.PLUS, spec,
                                  details=True)
print(f"truncation energy: {info['e_cut']:.1f}")
print(f"tail estimate:     {info['tail_estimate']:.1e}")
for channel, value in info["per_channel"].items():
    print(f"  {channel:>5} channel: {value:.8f}")
print()

# The energy spread narrows as the packet widens, as the Fourier scaling
# demands.
print("mean window [8, 10] for three widths")
for width in (0.7, 1.0, 2.0):
    g = build_test_function(model, GaussianPacket(center=-20.0, width=width,
                                                  momentum=3.0))
    g = g.scaled(1.0 / math.sqrt(inner_product(g, g, spec).real))
    p = spectral_probability(g, 8.0, 10.0, SignLabel.PLUS, spec)
    print(f"  width {width:3.1f}: P(8 <= E < 10) = {p:.6f}")
