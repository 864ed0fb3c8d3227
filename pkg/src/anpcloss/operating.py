"""Electrical operating point of one inverter leg and the imposed load current."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["OperatingPoint", "load_current", "STUDY_CASE"]

M_MAX = 1.15


@dataclass(frozen=True)
class OperatingPoint:
    """Steady-state scenario.

    ``phi`` is the lag of the load current behind the reference voltage, in
    radian; ``cos(phi)`` is the displacement power factor.
    """

    m: float
    phi: float
    i_peak: float
    v_dc: float = 200.0
    f_e: float = 50.0
    f_sw: float = 50e3

    def __post_init__(self):
        if not (0.0 <= self.m <= M_MAX):
            raise ValueError(f"modulation index must lie in [0, {M_MAX}], got {self.m!r}")
        if not (math.isfinite(self.phi) and 0.0 <= self.phi < 2 * math.pi):
            raise ValueError(f"phi must lie in [0, 2*pi), got {self.phi!r}")
        if not (math.isfinite(self.i_peak) and self.i_peak >= 0):
            raise ValueError(f"i_peak must be >= 0, got {self.i_peak!r}")
        if not self.v_dc > 0:
            raise ValueError(f"v_dc must be positive, got {self.v_dc!r}")
        if not (self.f_e > 0 and self.f_sw > self.f_e):
            raise ValueError(f"need f_sw > f_e > 0, got f_e={self.f_e!r}, f_sw={self.f_sw!r}")

    @classmethod
    def from_cos_phi(cls, m, cos_phi, i_peak, **kw) -> "OperatingPoint":
        if not -1.0 <= cos_phi <= 1.0:
            raise ValueError(f"cos_phi must lie in [-1, 1], got {cos_phi!r}")
        return cls(m=m, phi=math.acos(cos_phi), i_peak=i_peak, **kw)

    @property
    def ratio(self) -> float:
        """Carrier periods per fundamental period."""
        return self.f_sw / self.f_e

    @property
    def cos_phi(self) -> float:
        return math.cos(self.phi)


# experimental point: 200 V bus, 50 kHz carrier, 3 A peak, m = 0.7, cos(phi) = 0.9
STUDY_CASE = OperatingPoint.from_cos_phi(0.7, 0.9, 3.0, v_dc=200.0, f_e=50.0, f_sw=50e3)


def load_current(theta, op: OperatingPoint):
    """Sinusoidal load current ``i_peak * sin(theta - phi)``, positive out of the leg."""
    out = op.i_peak * np.sin(np.asarray(theta, dtype=float) - op.phi)
    if np.ndim(out) == 0:
        return float(out)
    return out
