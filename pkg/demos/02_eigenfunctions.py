"""Generalized eigenfunctions of the barrier Hamiltonian, point by point.

These are the bounded, non-normalizable solutions that carry the continuous
spectrum: an incoming plane wave from one side, a reflected and a
transmitted piece, and inside the barrier either an oscillation (above the
top) or an evanescent profile (below it).  The script prints values across
the barrier so the matching is visible by eye.
"""

import numpy as np

from barrierkets import (
    BarrierModel,
    Channel,
    SignLabel,
    energy_prefactor,
    scattering_wave,
)

model = BarrierModel()


def profile(energy, channel):
    xs = np.linspace(-0.5, 1.5, 9)
    vals = scattering_wave(model, energy, channel, SignLabel.PLUS, xs)
    label = "left" if channel is Channel.LEFT else "right"
    print(f"E = {energy}, {label} incidence")
    for x, v in zip(xs, vals):
        where = "inside " if 0.0 <= x <= 1.0 else "outside"
        print(f"  x = {x:6.2f}  {where}  psi = {v.real:+.6f} {v.imag:+.6f}i"
              f"   |psi| = {abs(v):.6f}")
    print()


# Below the barrier top the interior profile decays away from the entry
# face; the tunneling tail is what feeds the transmitted wave.
profile(1.0, Channel.LEFT)

# The mirrored channel tunnels from the right instead.
profile(1.0, Channel.RIGHT)

# Above the top the interior oscillates with the reduced wave number
# kappa = sqrt(E - 2), shorter than the exterior k = sqrt(E).
profile(8.0, Channel.LEFT)

# Continuity at the steps: the eigenfunction and its derivative match on
# both faces.  Sample one-sided limits numerically.
energy = 3.7
eps = 1e-7
for step in (model.a, model.b):
    left = scattering_wave(model, energy, Channel.LEFT, SignLabel.PLUS,
                           np.array([step - eps]))[0]
    right = scattering_wave(model, energy, Channel.LEFT, SignLabel.PLUS,
                            np.array([step + eps]))[0]
    print(f"step at x = {step}: jump |psi(-) - psi(+)| = {abs(left - right):.2e}")
print()

# The spectral normalization folds the density of states into a prefactor
# N(k) = sqrt(m / (2 pi k hbar^2)); with it, energy integrals of
# |amplitude|^2 become plain probabilities.
for energy in (1.0, 4.0, 25.0):
    k = np.sqrt(energy)
    print(f"E = {energy:5.1f}  N(k) = {energy_prefactor(model, k):.8f}")
