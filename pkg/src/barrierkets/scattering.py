"""Transmission and reflection amplitudes of the rectangular barrier.

The solve propagates boundary data (psi, psi') across the barrier with the
pair cos(kappa d) and d*sinc(kappa d), both entire in kappa^2, so the
propagating, evanescent and threshold regimes share one code path.  Interior
amplitudes are additionally extracted in the interface-scaled basis
{exp(i kappa (x-a)), exp(-i kappa (x-b))}, whose members stay bounded inside
the barrier for Im kappa >= 0; that representation is what downstream
evaluation uses when the barrier is opaque, where the textbook basis
{exp(+-i kappa x)} would demand catastrophic cancellation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import ConditioningError
from .model import BarrierModel, wave_numbers

__all__ = [
    "Channel",
    "SignLabel",
    "ScatteringSolution",
    "solve_matching",
    "s_matrix",
]

# Relative half-width of the energy shell around v0 inside which the
# exponential interior basis is treated as degenerate.
_DEGENERATE_RTOL = 1e-12

# Below this |kappa| * width, interior evaluation switches to the
# cos / d*sinc propagator; the exponential basis loses accuracy to
# cancellation while the propagator stays exact.
SMALL_PHASE = 0.5


class Channel(Enum):
    """Incidence channel of a degenerate scattering energy."""

    LEFT = "left"
    RIGHT = "right"


class SignLabel(Enum):
    """Boundary-condition family: plus = incoming, minus = outgoing."""

    PLUS = "plus"
    MINUS = "minus"


@dataclass(frozen=True)
class ScatteringSolution:
    """Matching data of both incidence channels at one energy.

    t, r_l, r_r are the transmission and reflection amplitudes.  a_l, b_l,
    a_r, b_r are the interior amplitudes in the basis {e^{i kappa x},
    e^{-i kappa x}}; they are NaN inside the degenerate shell around the
    barrier top, where that basis ceases to exist (interior values remain
    available through the propagator route).  sc_l / sc_r hold the same
    interior data in the interface-scaled basis.
    """

    energy: float
    k: float
    kappa: complex
    kappa_sq: float
    t: complex
    r_l: complex
    r_r: complex
    a_l: complex
    b_l: complex
    a_r: complex
    b_r: complex
    sc_l: tuple[complex, complex]
    sc_r: tuple[complex, complex]
    degenerate: bool


def _sinc_scalar(z: complex) -> complex:
    if abs(z) < 1e-4:
        z2 = z * z
        return 1.0 - z2 / 6.0 * (1.0 - z2 / 20.0)
    return cmath.sin(z) / z


@lru_cache(maxsize=65536)
def _solve_cached(model: BarrierModel, energy: float) -> ScatteringSolution:
    wn = wave_numbers(model, energy)
    k, kappa, kappa_sq = wn.k, wn.kappa, wn.kappa_sq
    a, b, d = model.a, model.b, model.width
    if kappa.imag * d > 690.0:
        raise ConditioningError(
            f"barrier opacity |Im kappa|*width = {kappa.imag * d:.1f} exceeds "
            "floating-point range")

    zc = cmath.cos(kappa * d)
    zs = d * _sinc_scalar(kappa * d)
    ik = 1j * k

    # Left incidence: unit transmitted wave at b, propagated back to a.
    eb = cmath.exp(ik * b)
    psi_b, dpsi_b = eb, ik * eb
    psi_a = zc * psi_b - zs * dpsi_b
    dpsi_a = kappa_sq * zs * psi_b + zc * dpsi_b
    ea = cmath.exp(ik * a)
    c_in = 0.5 * (psi_a + dpsi_a / ik) / ea
    c_ref = 0.5 * (psi_a - dpsi_a / ik) * ea
    if not (cmath.isfinite(c_in) and abs(c_in) > 1e-12):
        raise ConditioningError(f"left matching system is singular at E={energy}")
    t = 1.0 / c_in
    r_l = c_ref / c_in

    # Right incidence: unit transmitted wave at a, propagated forward to b.
    ea_m = cmath.exp(-ik * a)
    psi_a2, dpsi_a2 = ea_m, -ik * ea_m
    psi_b2 = zc * psi_a2 + zs * dpsi_a2
    dpsi_b2 = -kappa_sq * zs * psi_a2 + zc * dpsi_a2
    c_in2 = 0.5 * (psi_b2 - dpsi_b2 / ik) * eb
    c_ref2 = 0.5 * (psi_b2 + dpsi_b2 / ik) / eb
    if not (cmath.isfinite(c_in2) and abs(c_in2) > 1e-12):
        raise ConditioningError(f"right matching system is singular at E={energy}")
    t2 = 1.0 / c_in2
    r_r = c_ref2 / c_in2

    degenerate = abs(energy - model.v0) <= _DEGENERATE_RTOL * max(1.0, model.v0)
    nan = complex(float("nan"), float("nan"))
    if degenerate:
        sc_l = (nan, nan)
        sc_r = (nan, nan)
        a_l = b_l = a_r = b_r = nan
    else:
        ikap = 1j * kappa
        # Each scaled amplitude is read off at the interface where its basis
        # function is O(1): no growing exponentials enter.
        alpha_l = 0.5 * (psi_a + dpsi_a / ikap) * t
        beta_l = 0.5 * eb * (1.0 - k / kappa) * t
        alpha_r = 0.5 * ea_m * (1.0 - k / kappa) * t2
        beta_r = 0.5 * (psi_b2 - dpsi_b2 / ikap) * t2
        sc_l = (alpha_l, beta_l)
        sc_r = (alpha_r, beta_r)
        ph_a = cmath.exp(-ikap * a)
        ph_b = cmath.exp(ikap * b)
        a_l = alpha_l * ph_a
        b_l = beta_l * ph_b
        a_r = alpha_r * ph_a
        b_r = beta_r * ph_b

    return ScatteringSolution(
        energy=energy, k=k, kappa=kappa, kappa_sq=kappa_sq,
        t=t, r_l=r_l, r_r=r_r,
        a_l=a_l, b_l=b_l, a_r=a_r, b_r=b_r,
        sc_l=sc_l, sc_r=sc_r, degenerate=degenerate)


def solve_matching(model: BarrierModel, energy: float) -> ScatteringSolution:
    """Match plane waves across the barrier at energy E > 0."""
    return _solve_cached(model, float(energy))


def s_matrix(model: BarrierModel, energy: float) -> np.ndarray:
    """The 2x2 scattering matrix [[T, R_r], [R_l, T]] at energy E."""
    sol = solve_matching(model, energy)
    return np.array([[sol.t, sol.r_r], [sol.r_l, sol.t]], dtype=complex)
