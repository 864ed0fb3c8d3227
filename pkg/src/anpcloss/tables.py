"""Per-strategy conduction and hard-switching tables for the upper devices.

A fundamental period splits into four quadrants by the sign of the reference
``v`` and of the load current ``i`` (current lags the reference by ``phi``)::

    "v+i-"  0 < theta < phi            "v-i+"  pi < theta < pi + phi
    "v+i+"  phi < theta < pi           "v-i-"  pi + phi < theta < 2 pi

Within a quadrant each device conducts for a fraction of every carrier period
given by one of four duty laws of the normalised reference ``v``:
``"v"`` (P state share in the positive half), ``"1-v"`` (zero state, positive
half), ``"1+v"`` (zero state, negative half) and ``"1"``. ``share`` is the
fraction of the load current the device carries while conducting; 0.5 on the
doubled zero-state paths of full-path clamping.

Lower devices mirror the upper ones over half a period: S4 <- S1, S3 <- S2,
S6 <- S5, same direction label.

RMS closed forms are stored as the bracket ``B(m, phi)`` in
``I_rms = I_p / sqrt(2 pi) * sqrt(B)``. ``printed`` reproduces the published
table (operators that are missing in print restored, see
``docs/rms_closed_form_corrections.md``); ``derived`` is the integral of the duty
profile below. ``corrected`` marks the entries whose printed form disagrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .modulation import Strategy

__all__ = [
    "QUADRANTS",
    "MIRROR",
    "DUTY_TABLE",
    "HARD_SWITCHING",
    "ClosedForm",
    "CLOSED_FORMS",
    "quadrant_intervals",
]

QUADRANTS = ("v+i-", "v+i+", "v-i+", "v-i-")

MIRROR = {"S4": "S1", "S3": "S2", "S6": "S5"}

_S, _O, _F, _D = Strategy.ANPC_SSCM, Strategy.ANPC_OSCM, Strategy.ANPC_FPCM, Strategy.DNPC

_OUTER = {
    ("S1", "F"): [("v+i+", "v", 1.0)],
    ("S1", "R"): [("v+i-", "v", 1.0)],
}

# (device, direction) -> [(quadrant, duty law, current share)]
DUTY_TABLE: dict[Strategy, dict[tuple[str, str], list[tuple[str, str, float]]]] = {
    _D: {
        **_OUTER,
        ("S2", "F"): [("v+i+", "1", 1.0), ("v-i+", "1+v", 1.0)],
        ("S2", "R"): [("v+i-", "v", 1.0)],
        ("S5", "F"): [],
        ("S5", "R"): [("v+i+", "1-v", 1.0), ("v-i+", "1+v", 1.0)],
    },
    _S: {
        **_OUTER,
        ("S2", "F"): [("v+i+", "1", 1.0)],
        ("S2", "R"): [("v+i-", "1", 1.0)],
        ("S5", "F"): [("v+i-", "1-v", 1.0)],
        ("S5", "R"): [("v+i+", "1-v", 1.0)],
    },
    _O: {
        **_OUTER,
        ("S2", "F"): [("v+i+", "v", 1.0), ("v-i+", "1+v", 1.0)],
        ("S2", "R"): [("v+i-", "v", 1.0), ("v-i-", "1+v", 1.0)],
        ("S5", "F"): [("v-i-", "1+v", 1.0)],
        ("S5", "R"): [("v-i+", "1+v", 1.0)],
    },
    _F: {
        **_OUTER,
        ("S2", "F"): [("v+i+", "v", 1.0), ("v+i+", "1-v", 0.5), ("v-i+", "1+v", 0.5)],
        ("S2", "R"): [("v+i-", "v", 1.0), ("v+i-", "1-v", 0.5), ("v-i-", "1+v", 0.5)],
        ("S5", "F"): [("v+i-", "1-v", 0.5), ("v-i-", "1+v", 0.5)],
        ("S5", "R"): [("v+i+", "1-v", 0.5), ("v-i+", "1+v", 0.5)],
    },
}

# device -> [(quadrant, current share)] where it is hard-switched once on and
# once off in every carrier period. Only the switch that takes or releases
# forward channel current dissipates; the partner commutes at zero voltage.
HARD_SWITCHING: dict[Strategy, dict[str, list[tuple[str, float]]]] = {
    _D: {"S1": [("v+i+", 1.0)], "S2": [("v-i+", 1.0)], "S5": []},
    _S: {"S1": [("v+i+", 1.0)], "S2": [], "S5": [("v+i-", 1.0)]},
    _O: {"S1": [], "S2": [("v+i+", 1.0), ("v-i+", 1.0)], "S5": []},
    _F: {"S1": [("v+i+", 1.0)], "S2": [("v-i+", 0.5)], "S5": [("v+i-", 0.5)]},
}


def quadrant_intervals(phi: float) -> dict[str, tuple[float, float]]:
    """Angular interval of each quadrant for a current lag ``phi`` in [0, 2 pi)."""
    pi = math.pi
    if 0.0 <= phi <= pi:
        return {
            "v+i-": (0.0, phi),
            "v+i+": (phi, pi),
            "v-i+": (pi, pi + phi),
            "v-i-": (pi + phi, 2 * pi),
        }
    if pi < phi < 2 * pi:
        # leading current: zero crossing at phi - pi inside the positive half
        return {
            "v+i+": (0.0, phi - pi),
            "v+i-": (phi - pi, pi),
            "v-i-": (pi, phi),
            "v-i+": (phi, 2 * pi),
        }
    raise ValueError(f"phi must lie in [0, 2*pi), got {phi!r}")


BracketFn = Callable[[float, float], float]


@dataclass(frozen=True)
class ClosedForm:
    derived: BracketFn
    derived_text: str
    printed: Optional[BracketFn] = None
    printed_text: str = ""
    corrected: bool = False


def _c(phi):
    return math.cos(phi)


_S1F = ClosedForm(
    derived=lambda m, p: m * (_c(p) + 1) ** 2 / 3,
    derived_text="m (cos phi + 1)^2 / 3",
    printed=lambda m, p: m * (_c(p) + 1) ** 2 / 3,
    printed_text="m (cos phi + 1)^2 / 3",
)
_S1R = ClosedForm(
    derived=lambda m, p: m * (_c(p) - 1) ** 2 / 3,
    derived_text="m (cos phi - 1)^2 / 3",
    printed=lambda m, p: m * (_c(p) - 1) ** 2 / 3,
    printed_text="m (cos phi - 1)^2 / 3",
)

_HALF_PLUS = "pi/2 - phi/2 + sin(2 phi)/4"
_HALF_MINUS = "phi/2 - sin(2 phi)/4"


def _lag_hi(p):
    return math.pi / 2 - p / 2 + math.sin(2 * p) / 4


def _lag_lo(p):
    return p / 2 - math.sin(2 * p) / 4


CLOSED_FORMS: dict[Strategy, dict[tuple[str, str], ClosedForm]] = {
    _D: {
        ("S1", "F"): _S1F,
        ("S1", "R"): _S1R,
        ("S2", "F"): ClosedForm(
            derived=lambda m, p: math.pi / 2 - m * (_c(p) - 1) ** 2 / 3,
            derived_text="pi/2 - m (cos phi - 1)^2 / 3",
            printed=lambda m, p: math.pi / 2 - (m * _c(p) - 1) ** 2 / 3,
            printed_text="pi/2 - (m cos phi - 1)^2 / 3",
            corrected=True,
        ),
        ("S2", "R"): _S1R,
        ("S5", "F"): ClosedForm(derived=lambda m, p: 0.0, derived_text="0"),
        ("S5", "R"): ClosedForm(
            derived=lambda m, p: math.pi / 2 - 2 * m * (1 + _c(p) ** 2) / 3,
            derived_text="pi/2 - 2 m (1 + cos^2 phi) / 3",
            printed=lambda m, p: math.pi / 2 - 2 * m * (1 + _c(p)) ** 2 / 3,
            printed_text="pi/2 - 2 m (1 + cos phi)^2 / 3",
            corrected=True,
        ),
    },
    _S: {
        ("S1", "F"): _S1F,
        ("S1", "R"): _S1R,
        ("S2", "F"): ClosedForm(
            derived=lambda m, p: _lag_hi(p),
            derived_text=_HALF_PLUS,
            printed=lambda m, p: _lag_hi(p),
            printed_text=_HALF_PLUS,
        ),
        ("S2", "R"): ClosedForm(
            derived=lambda m, p: _lag_lo(p),
            derived_text=_HALF_MINUS,
            printed=lambda m, p: math.pi / 2 - math.sin(2 * p) / 4,
            printed_text="pi/2 - sin(2 phi)/4",
            corrected=True,
        ),
        ("S5", "F"): ClosedForm(
            derived=lambda m, p: _lag_lo(p) - m * (_c(p) - 1) ** 2 / 3,
            derived_text=_HALF_MINUS + " - m (cos phi - 1)^2 / 3",
            printed=lambda m, p: _lag_lo(p) - m * (_c(p) - 1) ** 2 / 3,
            printed_text=_HALF_MINUS + " - m (cos phi - 1)^2 / 3",
        ),
        ("S5", "R"): ClosedForm(
            derived=lambda m, p: _lag_hi(p) - m * (_c(p) + 1) ** 2 / 3,
            derived_text=_HALF_PLUS + " - m (cos phi + 1)^2 / 3",
            printed=lambda m, p: _lag_hi(p) - m * (_c(p) - 1) ** 2 / 3,
            printed_text=_HALF_PLUS + " - m (cos phi - 1)^2 / 3",
            corrected=True,
        ),
    },
    _O: {
        ("S1", "F"): _S1F,
        ("S1", "R"): _S1R,
        ("S2", "F"): ClosedForm(
            derived=lambda m, p: _lag_lo(p) + 4 * m * _c(p) / 3,
            derived_text=_HALF_MINUS + " + 4 m cos phi / 3",
            printed=lambda m, p: 4 * m * _c(p) / 3,
            printed_text="4 m cos phi / 3",
            corrected=True,
        ),
        ("S2", "R"): ClosedForm(
            derived=lambda m, p: _lag_hi(p) - 4 * m * _c(p) / 3,
            derived_text=_HALF_PLUS + " - 4 m cos phi / 3",
            printed=lambda m, p: _lag_hi(p) - m * (_c(p) - 1) ** 2 / 3 - m * (_c(p) + 1) ** 2 / 3,
            printed_text=_HALF_PLUS + " - m (cos phi - 1)^2 / 3 - m (cos phi + 1)^2 / 3",
            corrected=True,
        ),
        ("S5", "F"): ClosedForm(
            derived=lambda m, p: _lag_hi(p) - m * (_c(p) + 1) ** 2 / 3,
            derived_text=_HALF_PLUS + " - m (cos phi + 1)^2 / 3",
            printed=lambda m, p: _lag_hi(p) - m * (_c(p) + 1) ** 2 / 3,
            printed_text=_HALF_PLUS + " - m (cos phi + 1)^2 / 3",
        ),
        ("S5", "R"): ClosedForm(
            derived=lambda m, p: _lag_lo(p) - m * (_c(p) - 1) ** 2 / 3,
            derived_text=_HALF_MINUS + " - m (cos phi - 1)^2 / 3",
            printed=lambda m, p: _lag_lo(p) - m * (_c(p) - 1) ** 2 / 3,
            printed_text=_HALF_MINUS + " - m (cos phi - 1)^2 / 3",
        ),
    },
    _F: {
        ("S1", "F"): _S1F,
        ("S1", "R"): _S1R,
        ("S2", "F"): ClosedForm(
            derived=lambda m, p: math.pi / 8 + m * (_c(p) ** 2 + 4 * _c(p) + 1) / 6,
            derived_text="pi/8 + m (cos^2 phi + 4 cos phi + 1) / 6",
            printed=lambda m, p: math.pi / 8 + m * _c(p),
            printed_text="pi/8 + m cos phi",
            corrected=True,
        ),
        ("S2", "R"): ClosedForm(
            derived=lambda m, p: math.pi / 8 + m * (_c(p) ** 2 - 4 * _c(p) + 1) / 6,
            derived_text="pi/8 + m (cos^2 phi - 4 cos phi + 1) / 6",
            printed=lambda m, p: math.pi / 8 - m * (_c(p) + 1) ** 2 / 12,
            printed_text="pi/8 - m (cos phi + 1)^2 / 12",
            corrected=True,
        ),
        ("S5", "F"): ClosedForm(
            derived=lambda m, p: math.pi / 8 - m * (1 + _c(p) ** 2) / 6,
            derived_text="pi/8 - m (1 + cos^2 phi) / 6",
            printed=lambda m, p: math.pi / 8 - m * _c(p) / 3,
            printed_text="pi/8 - m cos phi / 3",
            corrected=True,
        ),
        ("S5", "R"): ClosedForm(
            derived=lambda m, p: math.pi / 8 - m * (1 + _c(p) ** 2) / 6,
            derived_text="pi/8 - m (1 + cos^2 phi) / 6",
            printed=lambda m, p: math.pi / 8 - m * _c(p) / 3,
            printed_text="pi/8 - m cos phi / 3",
            corrected=True,
        ),
    },
}
