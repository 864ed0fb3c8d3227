"""Phase-disposition carrier PWM for one ANPC leg.

Four gating strategies are supported. All of them are pure functions of three
comparator booleans::

    c1 = v_ref > v_tri1      (upper carrier, spans [0, 1])
    c2 = v_ref > v_tri2      (lower carrier, spans [-1, 0])
    s  = v_ref > 0           (half-cycle sign)

Switch numbering follows the usual ANPC leg: S1/S2 the upper series pair,
S3/S4 the lower one, S5/S6 the clamps from the inner nodes to the neutral.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .operating import OperatingPoint, load_current

__all__ = [
    "Strategy",
    "ReferenceKind",
    "GateVector",
    "CommutationEvent",
    "SwitchingClass",
    "DEVICES",
    "reference_value",
    "carrier_values",
    "sample_grid",
    "gate_vector",
    "gate_array",
    "truth_table",
    "fundamental_vs_switching_classification",
    "apply_dead_time",
    "gate_edges",
    "commutation_events",
    "pattern_table",
]

DEVICES = ("S1", "S2", "S3", "S4", "S5", "S6")

MIN_RATIO = 20


class Strategy(str, enum.Enum):
    DNPC = "DNPC"
    ANPC_SSCM = "ANPC_SSCM"
    ANPC_OSCM = "ANPC_OSCM"
    ANPC_FPCM = "ANPC_FPCM"

    @classmethod
    def parse(cls, name: str) -> "Strategy":
        key = name.strip().upper().replace("-", "_")
        aliases = {"SSCM": "ANPC_SSCM", "OSCM": "ANPC_OSCM", "FPCM": "ANPC_FPCM"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            valid = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown strategy {name!r} (expected one of {valid})") from None


class ReferenceKind(str, enum.Enum):
    SINUSOIDAL = "sinusoidal"
    THI = "thi"

    @classmethod
    def parse(cls, name: str) -> "ReferenceKind":
        key = name.strip().lower().replace("-", "_")
        if key in ("third_harmonic_injection", "thirdharmonicinjection"):
            key = "thi"
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown reference kind {name!r} (expected 'sinusoidal' or 'thi')") from None

    @property
    def m_max(self) -> float:
        return 1.0 if self is ReferenceKind.SINUSOIDAL else 1.15


class GateVector(NamedTuple):
    s1: bool
    s2: bool
    s3: bool
    s4: bool
    s5: bool
    s6: bool

    def as_bits(self) -> tuple[int, ...]:
        return tuple(int(b) for b in self)


@dataclass(frozen=True)
class CommutationEvent:
    """One gate edge.

    ``hard`` tells whether the edge dissipates switching energy. Gate-level
    extraction cannot know that and marks every edge hard; the loss model and
    the simulator refine it from the conduction state.
    """

    device: str
    theta: float
    edge: str  # "on" | "off"
    i_ds: float
    hard: bool = True


@dataclass(frozen=True)
class SwitchingClass:
    rate: str  # "carrier" | "fundamental" | "static"
    carrier_halves: tuple[str, ...] = ()  # subset of ("positive", "negative")


def reference_value(theta, m: float, kind: ReferenceKind = ReferenceKind.SINUSOIDAL):
    """Normalised reference voltage; ``1`` corresponds to half the DC bus."""
    kind = ReferenceKind(kind)
    if not 0.0 <= m <= kind.m_max:
        raise ValueError(f"m={m!r} outside [0, {kind.m_max}] for {kind.value} reference")
    theta = np.asarray(theta, dtype=float)
    if kind is ReferenceKind.SINUSOIDAL:
        out = m * np.sin(theta)
    else:
        out = m * (np.sin(theta) + np.sin(3 * theta) / 6.0)
    if out.ndim == 0:
        return float(out)
    return out


def _triangle(phase):
    # peak 1 at phase 0, valley 0 at phase 1/2
    return np.abs(1.0 - 2.0 * phase)


def carrier_values(theta, ratio: float):
    """Level-shifted carrier pair ``(v_tri1, v_tri2)`` at fundamental angle ``theta``."""
    if not ratio > 0:
        raise ValueError(f"carrier ratio must be positive, got {ratio!r}")
    phase = np.mod(np.asarray(theta, dtype=float) * ratio / (2 * math.pi), 1.0)
    tri1 = _triangle(phase)
    tri2 = tri1 - 1.0
    if tri1.ndim == 0:
        return float(tri1), float(tri2)
    return tri1, tri2


def sample_grid(ratio: float, steps_per_carrier: int):
    """Uniform grid over one fundamental period, aligned to carrier peaks.

    Returns ``(theta, v_tri1, v_tri2)``. For an integer ``ratio`` the carrier
    phase is taken from the integer sample index so that every carrier period
    is sampled identically.
    """
    n = int(round(ratio * steps_per_carrier))
    if n < 2:
        raise ValueError("grid too coarse")
    k = np.arange(n)
    theta = 2 * math.pi * k / n
    if float(ratio).is_integer():
        phase = (k % steps_per_carrier) / steps_per_carrier
    else:
        phase = np.mod(k * ratio / n, 1.0)
    tri1 = _triangle(phase)
    return theta, tri1, tri1 - 1.0


def _gates_from_comparators(strategy: Strategy, c1, c2, s):
    c1 = np.asarray(c1, dtype=bool)
    c2 = np.asarray(c2, dtype=bool)
    s = np.asarray(s, dtype=bool)
    zero = np.zeros(np.broadcast(c1, c2, s).shape, dtype=bool)
    if strategy is Strategy.DNPC:
        g = (c1, c2, ~c1, ~c2, zero, zero)
    elif strategy is Strategy.ANPC_SSCM:
        g = (c1, s, ~s, ~c2, ~c1, c2)
    elif strategy is Strategy.ANPC_OSCM:
        s2 = np.where(s, c1, c2)
        g = (s, s2, ~s2, ~s, ~s, s)
    elif strategy is Strategy.ANPC_FPCM:
        # S3 = S5 = not c1, S2 = S6 = c2: both clamp paths closed in every zero state
        g = (c1, c2, ~c1, ~c2, ~c1, c2)
    else:  # pragma: no cover
        raise ValueError(f"unknown strategy {strategy!r}")
    return np.stack(np.broadcast_arrays(*g), axis=-1)


def gate_array(strategy: Strategy, v_ref, v_tri1, v_tri2) -> np.ndarray:
    """Vectorised gating: boolean array of shape ``(..., 6)`` ordered S1..S6."""
    strategy = Strategy(strategy)
    v_ref = np.asarray(v_ref, dtype=float)
    c1 = v_ref > v_tri1
    c2 = v_ref > v_tri2
    s = v_ref > 0
    return _gates_from_comparators(strategy, c1, c2, s)


def gate_vector(strategy: Strategy, v_ref: float, v_tri1: float, v_tri2: float) -> GateVector:
    return GateVector(*(bool(b) for b in gate_array(strategy, v_ref, v_tri1, v_tri2)))


def truth_table(strategy: Strategy) -> dict[tuple[bool, bool, bool], GateVector]:
    """All 8 comparator combinations ``(c1, c2, s)`` mapped to their gate vector."""
    strategy = Strategy(strategy)
    table = {}
    for c1 in (False, True):
        for c2 in (False, True):
            for s in (False, True):
                g = _gates_from_comparators(strategy, c1, c2, s)
                table[(c1, c2, s)] = GateVector(*(bool(b) for b in g))
    return table


def fundamental_vs_switching_classification(strategy: Strategy) -> dict[str, SwitchingClass]:
    """How often each switch toggles under a sinusoidal reference.

    In the positive half-cycle ``s`` and ``c2`` are fixed true and only ``c1``
    moves; in the negative half ``s`` and ``c1`` are fixed false and only ``c2``
    moves.
    """
    strategy = Strategy(strategy)
    pos = [_gates_from_comparators(strategy, c1, True, True) for c1 in (False, True)]
    neg = [_gates_from_comparators(strategy, False, c2, False) for c2 in (False, True)]
    out = {}
    for j, dev in enumerate(DEVICES):
        halves = []
        if pos[0][j] != pos[1][j]:
            halves.append("positive")
        if neg[0][j] != neg[1][j]:
            halves.append("negative")
        if halves:
            out[dev] = SwitchingClass("carrier", tuple(halves))
        elif pos[0][j] != neg[0][j]:
            out[dev] = SwitchingClass("fundamental")
        else:
            out[dev] = SwitchingClass("static")
    return out


def apply_dead_time(gates: np.ndarray, dead_time: float, step: float, periodic: bool = True) -> np.ndarray:
    """Delay every rising gate edge by ``dead_time``.

    ``gates`` is a time-ordered ``(n, 6)`` boolean stream sampled every
    ``step`` seconds. A switch is driven on only once its command has been on
    for the whole dead time, so each turn-on lags the complementary turn-off.
    The delay is rounded to whole samples.
    """
    gates = np.asarray(gates, dtype=bool)
    if dead_time < 0:
        raise ValueError(f"dead time must be >= 0, got {dead_time!r}")
    if dead_time == 0:
        return gates.copy()
    if not step > 0 or step > dead_time:
        raise ValueError(f"sample step {step!r} s too coarse to represent dead time {dead_time!r} s")
    n_delay = max(1, int(round(dead_time / step)))
    out = gates.copy()
    for j in range(1, n_delay + 1):
        if periodic:
            shifted = np.roll(gates, j, axis=0)
        else:
            shifted = np.concatenate([np.repeat(gates[:1], j, axis=0), gates[:-j]], axis=0)
        out &= shifted
    return out


def gate_edges(gates: np.ndarray):
    """Edges of a periodic gate stream.

    Returns ``(k, j, rising)``: sample index where the new state first appears,
    switch column, and edge direction. Sample 0 is compared with the last one.
    """
    gates = np.asarray(gates, dtype=bool)
    prev = np.roll(gates, 1, axis=0)
    k, j = np.nonzero(gates != prev)
    return k, j, gates[k, j]


def commutation_events(
    strategy: Strategy,
    op: OperatingPoint,
    steps_per_carrier: int = 256,
    kind: ReferenceKind = ReferenceKind.SINUSOIDAL,
) -> list[CommutationEvent]:
    """Every gate edge over one fundamental period, tagged with ``|I(theta)|``."""
    strategy = Strategy(strategy)
    if op.ratio < MIN_RATIO:
        raise ValueError(f"f_sw/f_e = {op.ratio:g} too small for carrier PWM (need >= {MIN_RATIO})")
    theta, tri1, tri2 = sample_grid(op.ratio, steps_per_carrier)
    gates = gate_array(strategy, reference_value(theta, op.m, kind), tri1, tri2)
    k, j, rising = gate_edges(gates)
    i_abs = np.abs(load_current(theta, op))
    events = [
        CommutationEvent(DEVICES[jj], float(theta[kk]), "on" if r else "off", float(i_abs[kk]))
        for kk, jj, r in zip(k.tolist(), j.tolist(), rising.tolist())
    ]
    return events


def pattern_table(
    strategy: Strategy,
    m: float,
    ratio: float,
    steps_per_period: int,
    kind: ReferenceKind = ReferenceKind.SINUSOIDAL,
):
    """Reference, carriers and gates on an even grid of one fundamental period."""
    if steps_per_period < 2:
        raise ValueError("steps_per_period must be >= 2")
    theta = 2 * math.pi * np.arange(steps_per_period) / steps_per_period
    v_ref = reference_value(theta, m, kind)
    tri1, tri2 = carrier_values(theta, ratio)
    return theta, v_ref, tri1, tri2, gate_array(strategy, v_ref, tri1, tri2)


def count_by_device(events: Sequence[CommutationEvent]) -> dict[str, int]:
    counts = dict.fromkeys(DEVICES, 0)
    for ev in events:
        counts[ev.device] += 1
    return counts
