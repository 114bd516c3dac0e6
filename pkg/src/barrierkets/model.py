"""Barrier geometry, unit constants and the formal observables.

The potential is a single rectangular step: V(x) = 0 for x < a, V(x) = v0 for
a <= x <= b, V(x) = 0 for x > b.  The closed convention (V equal to v0 at the
steps themselves) is adopted; test functions vanish at a and b together with
all their derivatives, so no smeared quantity depends on the choice.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np

from .errors import DomainError

__all__ = [
    "Observable",
    "BarrierModel",
    "WaveNumbers",
    "wave_numbers",
    "potential_at",
]


class Observable(Enum):
    """Position, momentum and energy, in that order."""

    Q = "Q"
    P = "P"
    H = "H"


@dataclass(frozen=True)
class BarrierModel:
    """Rectangular barrier of height ``v0`` on ``[a, b]``.

    Default units set hbar = 1 and mass = 1/2, so that k = sqrt(E) and
    kappa = sqrt(E - v0).
    """

    a: float = 0.0
    b: float = 1.0
    v0: float = 2.0
    hbar: float = 1.0
    mass: float = 0.5

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b) and self.a < self.b):
            raise DomainError(f"barrier edges must satisfy a < b, got a={self.a}, b={self.b}")
        if not (math.isfinite(self.v0) and self.v0 >= 0.0):
            raise DomainError(f"barrier height must be >= 0, got {self.v0}")
        if not (self.hbar > 0.0 and self.mass > 0.0):
            raise DomainError("hbar and mass must be positive")

    @property
    def width(self) -> float:
        return self.b - self.a

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "BarrierModel":
        unknown = set(data) - {"a", "b", "v0", "hbar", "mass"}
        if unknown:
            raise DomainError(f"unknown model keys: {sorted(unknown)}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "BarrierModel":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class WaveNumbers:
    """Exterior wave number k (real) and interior wave number kappa.

    kappa is the principal square root of kappa_sq = 2 m (E - v0) / hbar^2,
    taken with Im kappa >= 0, so evanescent interior waves decay away from
    the step they were matched at.
    """

    k: float
    kappa: complex
    kappa_sq: float


def wave_numbers(model: BarrierModel, energy: float) -> WaveNumbers:
    """Wave numbers for a scattering energy E > 0.

    Raises DomainError at or below the bottom of the continuous spectrum.
    """
    if not (math.isfinite(energy) and energy > 0.0):
        raise DomainError(f"energy must be > 0, got {energy}")
    two_m = 2.0 * model.mass
    k = math.sqrt(two_m * energy) / model.hbar
    kappa_sq = two_m * (energy - model.v0) / model.hbar**2
    if kappa_sq >= 0.0:
        kappa = complex(math.sqrt(kappa_sq), 0.0)
    else:
        kappa = complex(0.0, math.sqrt(-kappa_sq))
    return WaveNumbers(k=k, kappa=kappa, kappa_sq=kappa_sq)


def potential_at(model: BarrierModel, x):
    """Potential values, vectorized over x."""
    x = np.asarray(x)
    out = np.where((x >= model.a) & (x <= model.b), model.v0, 0.0)
    if out.ndim == 0:
        return float(out)
    return out
