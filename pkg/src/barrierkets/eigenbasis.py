"""Pointwise evaluation of the generalized eigenfunctions.

Energy eigenfunctions come in two degenerate channels per energy (incidence
from the left or from the right) and two boundary-condition families: the
plus family carries incoming asymptotics, the minus family is its pointwise
complex conjugate.  Both are delta-normalized in energy through the
prefactor sqrt(m / (2 pi k hbar^2)).  Momentum eigenfunctions are the plane
waves e^{ipx/hbar} / sqrt(2 pi hbar).  The position eigenfunctions are delta
distributions; they have no pointwise values and act only inside integrals,
so no evaluator for them exists here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import BarrierModel
from .scattering import SMALL_PHASE, Channel, ScatteringSolution, SignLabel, solve_matching

__all__ = [
    "EigenfunctionHandle",
    "eval_energy_eigenfunction",
    "eval_plane_wave",
    "energy_prefactor",
]


def energy_prefactor(model: BarrierModel, k):
    """Delta-normalization prefactor sqrt(m / (2 pi k hbar^2)).

    Accepts a scalar or an array of wave numbers.
    """
    val = np.sqrt(model.mass / (2.0 * np.pi * np.asarray(k, dtype=float)
                                * model.hbar**2))
    if np.ndim(k) == 0:
        return float(val)
    return val


def _sinc_arr(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-4
    safe = np.where(small, 1.0, z)
    out = np.sin(safe) / safe
    z2 = z * z
    return np.where(small, 1.0 - z2 / 6.0 * (1.0 - z2 / 20.0), out)


def _interior_values(sol: ScatteringSolution, channel: Channel, x: np.ndarray,
                     model: BarrierModel) -> np.ndarray:
    """Interior piece of the plus-family solution on a <= x <= b."""
    a, b = model.a, model.b
    if (not sol.degenerate) and abs(sol.kappa) * model.width > SMALL_PHASE:
        alpha, beta = sol.sc_l if channel is Channel.LEFT else sol.sc_r
        return (alpha * np.exp(1j * sol.kappa * (x - a))
                + beta * np.exp(-1j * sol.kappa * (x - b)))
    # Thin or threshold barrier: propagate boundary data with functions of
    # kappa^2 alone, exact down to kappa = 0.
    ik = 1j * sol.k
    if channel is Channel.LEFT:
        x0 = a
        e_p = np.exp(ik * a)
        psi0 = e_p + sol.r_l / e_p
        dpsi0 = ik * (e_p - sol.r_l / e_p)
    else:
        x0 = b
        e_m = np.exp(-ik * b)
        psi0 = e_m + sol.r_r / e_m
        dpsi0 = -ik * e_m + ik * sol.r_r / e_m
    dx = x - x0
    z = sol.kappa * dx
    return psi0 * np.cos(z) + dpsi0 * dx * _sinc_arr(z)


def scattering_wave(model: BarrierModel, energy: float, channel: Channel,
                    sign: SignLabel, x, include_prefactor: bool = True) -> np.ndarray:
    """Evaluate one generalized energy eigenfunction on an array of points."""
    sol = solve_matching(model, energy)
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(x_arr.shape, dtype=complex)
    a, b = model.a, model.b
    left = x_arr < a
    right = x_arr > b
    mid = ~(left | right)
    ik = 1j * sol.k
    if channel is Channel.LEFT:
        xl = x_arr[left]
        out[left] = np.exp(ik * xl) + sol.r_l * np.exp(-ik * xl)
        out[right] = sol.t * np.exp(ik * x_arr[right])
    else:
        out[left] = sol.t * np.exp(-ik * x_arr[left])
        xr = x_arr[right]
        out[right] = np.exp(-ik * xr) + sol.r_r * np.exp(ik * xr)
    if mid.any():
        out[mid] = _interior_values(sol, channel, x_arr[mid], model)
    if sign is SignLabel.MINUS:
        out = np.conj(out)
    if include_prefactor:
        out = out * energy_prefactor(model, sol.k)
    if np.ndim(x) == 0:
        return out[0]
    return out


@dataclass(frozen=True)
class EigenfunctionHandle:
    """One (energy, channel, sign) eigenfunction with its matching data cached."""

    model: BarrierModel
    energy: float
    channel: Channel
    sign: SignLabel
    solution: ScatteringSolution

    @classmethod
    def create(cls, model: BarrierModel, energy: float, channel: Channel,
               sign: SignLabel) -> "EigenfunctionHandle":
        return cls(model=model, energy=float(energy), channel=channel, sign=sign,
                   solution=solve_matching(model, energy))


def eval_energy_eigenfunction(handle: EigenfunctionHandle, x) -> np.ndarray:
    return scattering_wave(handle.model, handle.energy, handle.channel,
                           handle.sign, x)


def eval_plane_wave(model: BarrierModel, p: float, x) -> np.ndarray:
    """Momentum eigenfunction e^{ipx/hbar} / sqrt(2 pi hbar)."""
    x_arr = np.asarray(x, dtype=float)
    return np.exp(1j * p * x_arr / model.hbar) / math.sqrt(2.0 * math.pi * model.hbar)
