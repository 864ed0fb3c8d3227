"""Fixed-step switching simulator of one ANPC leg.

The load current is imposed as a sinusoid. At every step the gate vector is
mapped to the conducting path(s) between the output node and a DC-link rail,
which gives each device's signed current (positive = drain to source). The
result is independent of the averaged loss model: it only uses the gating
logic, the leg connectivity and the device curves.

Leg connectivity::

    DC+ --S1-- A --S2-- OUT --S3-- B --S4-- DC-
               A --S5-- N          B --S6-- N

Device orientation (forward = drain to source): S1 DC+->A, S2 A->OUT,
S3 OUT->B, S4 B->DC-, S5 A->N, S6 N->B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .device import DeviceParams, EnergyCurve, energy_at
from .modulation import (
    DEVICES,
    CommutationEvent,
    GateVector,
    ReferenceKind,
    Strategy,
    apply_dead_time,
    gate_array,
    gate_edges,
    reference_value,
    sample_grid,
)
from .operating import OperatingPoint, load_current
from .report import DeviceLoss, LossReport

__all__ = [
    "LegTopology",
    "SimConfig",
    "SimTrace",
    "SimulationAbort",
    "PathViolation",
    "RailShort",
    "Comparison",
    "rail_short_check",
    "conduction_paths",
    "simulate_leg",
    "trace_rms",
    "simulated_losses",
    "compare_reports",
]

DC_POS, NODE_A, OUT, NODE_B, DC_NEG, NEUTRAL = range(6)
RAILS = (DC_POS, NEUTRAL, DC_NEG)
RAIL_LEVEL = {DC_POS: "P", NEUTRAL: "0", DC_NEG: "N"}
RAIL_POTENTIAL = {DC_POS: 1, NEUTRAL: 0, DC_NEG: -1}


@dataclass(frozen=True)
class LegTopology:
    # switch index -> (drain node, source node)
    edges: tuple[tuple[int, int], ...] = (
        (DC_POS, NODE_A),
        (NODE_A, OUT),
        (OUT, NODE_B),
        (NODE_B, DC_NEG),
        (NODE_A, NEUTRAL),
        (NEUTRAL, NODE_B),
    )

    def paths(self):
        """Simple OUT-to-rail paths as ``(rail, ((switch, orientation), ...))``.

        ``orientation`` is +1 when current flowing rail -> OUT passes the switch
        drain to source.
        """
        out = []

        def walk(node, visited, hops):
            for j, (d, s) in enumerate(self.edges):
                if node not in (d, s):
                    continue
                other = s if node == d else d
                if other in visited:
                    continue
                # walking from OUT towards the rail; current flows the other way
                orient = +1 if other == d else -1
                step = hops + ((j, orient),)
                if other in RAILS:
                    out.append((other, tuple(reversed(step))))
                else:
                    walk(other, visited | {other}, step)

        walk(OUT, frozenset({OUT}), ())
        return tuple(out)


TOPOLOGY = LegTopology()
_PATHS = TOPOLOGY.paths()


class SimulationAbort(RuntimeError):
    def __init__(self, message, theta=None, gates=None):
        super().__init__(message)
        self.theta = theta
        self.gates = gates


class RailShort(SimulationAbort):
    pass


class PathViolation(SimulationAbort):
    pass


def _as_bits(gates) -> tuple[bool, ...]:
    bits = tuple(bool(b) for b in gates)
    if len(bits) != 6:
        raise ValueError("gate vector needs 6 entries")
    return bits


def rail_short_check(gates) -> bool:
    """True when the closed switches connect two of DC+, DC- and neutral."""
    bits = _as_bits(gates)
    parent = list(range(6))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for j, (d, s) in enumerate(TOPOLOGY.edges):
        if bits[j]:
            parent[find(d)] = find(s)
    roots = [find(r) for r in RAILS]
    return len(set(roots)) < len(roots)


@dataclass(frozen=True)
class PathResolution:
    rail: Optional[int]
    coeff: tuple[float, ...]  # device current per ampere of load current
    flows: dict = field(default_factory=dict)  # (device, "F"|"R") -> share

    @property
    def level(self) -> str:
        return RAIL_LEVEL.get(self.rail, "-")


@lru_cache(maxsize=None)
def _resolve(bits: tuple[bool, ...], sign: int) -> PathResolution:
    if rail_short_check(bits):
        raise RailShort(f"rail short for gates {tuple(int(b) for b in bits)}", gates=bits)
    closed = [(rail, hops) for rail, hops in _PATHS if all(bits[j] for j, _ in hops)]
    if not closed:
        # an open switch conducts only in the third quadrant
        feasible = [
            (rail, hops) for rail, hops in _PATHS if all(bits[j] or orient * sign < 0 for j, orient in hops)
        ]
        if not feasible:
            raise PathViolation(
                f"no conducting path for load current sign {sign:+d} with gates {tuple(int(b) for b in bits)}",
                gates=bits,
            )
        # the freewheeling current picks the nearest rail in the direction of flow
        pick = max if sign > 0 else min
        best = pick(RAIL_POTENTIAL[r] for r, _ in feasible)
        closed = [(r, h) for r, h in feasible if RAIL_POTENTIAL[r] == best]
    rails = {r for r, _ in closed}
    share = 1.0 / len(closed)
    coeff = [0.0] * 6
    flows = {}
    for _, hops in closed:
        for j, orient in hops:
            coeff[j] += orient * share
            key = (DEVICES[j], "F" if orient * sign > 0 else "R")
            flows[key] = flows.get(key, 0.0) + share
    return PathResolution(rails.pop(), tuple(coeff), flows)


def conduction_paths(gates, load_current_sign: int) -> PathResolution:
    """Conducting devices for one gate state and load current direction.

    Closed switches conduct both ways. If no fully closed path exists, open
    switches may carry reverse current. Parallel paths split evenly.
    """
    bits = _as_bits(gates)
    if load_current_sign == 0:
        return PathResolution(None, (0.0,) * 6, {})
    return _resolve(bits, 1 if load_current_sign > 0 else -1)


@dataclass(frozen=True)
class SimConfig:
    op: OperatingPoint
    strategy: Strategy
    kind: ReferenceKind = ReferenceKind.SINUSOIDAL
    dead_time: float = 0.0
    steps_per_carrier_period: int = 256
    include_reverse_conduction_drop: bool = False
    reverse_drop_v: float = 4.5
    # experimental RL load, informational only: the current is imposed
    load_r: float = 20.65
    load_l: float = 1e-3

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        object.__setattr__(self, "kind", ReferenceKind(self.kind))
        if self.steps_per_carrier_period < 64:
            raise ValueError("steps_per_carrier_period must be >= 64")
        if self.dead_time < 0:
            raise ValueError("dead_time must be >= 0")
        if self.op.m > self.kind.m_max:
            raise ValueError(f"m={self.op.m!r} outside [0, {self.kind.m_max}] for {self.kind.value} reference")

    @property
    def step(self) -> float:
        return 1.0 / (self.op.f_sw * self.steps_per_carrier_period)


@dataclass(frozen=True, eq=False)
class SimTrace:
    config: SimConfig
    theta: np.ndarray
    gates: np.ndarray  # (n, 6) bool, after dead time
    i_load: np.ndarray
    i_dev: np.ndarray  # (n, 6) signed device currents
    level: np.ndarray  # (n,) "P" | "0" | "N"
    events: tuple[CommutationEvent, ...]

    @property
    def n_steps(self) -> int:
        return len(self.theta)

    @property
    def sum_sq(self) -> dict[str, float]:
        sq = np.sum(self.i_dev**2, axis=0)
        return {d: float(v) for d, v in zip(DEVICES, sq)}


def _lookup_tables():
    coeff = np.zeros((64, 2, 6))
    rail = np.full((64, 2), -1, dtype=int)
    bad = np.zeros((64, 2), dtype=bool)
    short = np.zeros(64, dtype=bool)
    for code in range(64):
        bits = tuple(bool(code >> j & 1) for j in range(6))
        short[code] = rail_short_check(bits)
        if short[code]:
            continue
        for si, sign in enumerate((1, -1)):
            try:
                res = _resolve(bits, sign)
            except PathViolation:
                bad[code, si] = True
                continue
            coeff[code, si] = res.coeff
            rail[code, si] = res.rail
    return coeff, rail, bad, short


_COEFF, _RAIL, _BAD, _SHORT = _lookup_tables()
# rail node -> output level; index 6 for "no path"
_LEVEL_CHARS = np.array([RAIL_LEVEL.get(n, "-") for n in range(6)] + ["-"])


def simulate_leg(config: SimConfig) -> SimTrace:
    """Sweep one fundamental period on a fixed grid and resolve device currents."""
    op = config.op
    theta, tri1, tri2 = sample_grid(op.ratio, config.steps_per_carrier_period)
    v_ref = reference_value(theta, op.m, config.kind)
    gates = gate_array(config.strategy, v_ref, tri1, tri2)
    gates = apply_dead_time(gates, config.dead_time, config.step)
    codes = gates.astype(np.int64) @ (1 << np.arange(6))

    shorted = np.nonzero(_SHORT[codes])[0]
    if shorted.size:
        k = int(shorted[0])
        raise RailShort(
            f"{config.strategy.value}: rail short at theta={theta[k]:.6f} rad, gates={GateVector(*map(bool, gates[k])).as_bits()}",
            theta=float(theta[k]),
            gates=tuple(bool(b) for b in gates[k]),
        )

    i_load = load_current(theta, op)
    sidx = (i_load < 0).astype(int)
    violating = np.nonzero(_BAD[codes, sidx] & (i_load != 0))[0]
    if violating.size:
        k = int(violating[0])
        raise PathViolation(
            f"{config.strategy.value}: no conducting path at theta={theta[k]:.6f} rad, "
            f"i={i_load[k]:+.4g} A, gates={GateVector(*map(bool, gates[k])).as_bits()}",
            theta=float(theta[k]),
            gates=tuple(bool(b) for b in gates[k]),
        )
    i_dev = _COEFF[codes, sidx] * i_load[:, None]

    rail = _RAIL[codes, sidx]
    # zero current in a state without a closed path: use the other sign's rail
    rail = np.where(rail < 0, _RAIL[codes, 1 - sidx], rail)
    level = _LEVEL_CHARS[np.where(rail < 0, 6, rail)]

    events = _events(theta, gates, i_dev)
    return SimTrace(config, theta, gates, i_load, i_dev, level, events)


def _events(theta, gates, i_dev) -> tuple[CommutationEvent, ...]:
    k, j, rising = gate_edges(gates)
    before = i_dev[k - 1, j]  # k - 1 = -1 wraps to the last sample
    after = i_dev[k, j]
    # an edge dissipates only while the channel takes or releases forward current
    conducting = np.where(rising, after, before)
    hard = conducting > 0
    return tuple(
        CommutationEvent(DEVICES[jj], float(theta[kk]), "on" if r else "off", float(abs(c)), bool(h))
        for kk, jj, r, c, h in zip(k.tolist(), j.tolist(), rising.tolist(), conducting.tolist(), hard.tolist())
    )


def trace_rms(trace: SimTrace, device: str, direction: Optional[str] = None) -> float:
    """RMS of a device current over the period.

    ``direction`` "forward"/"F" or "reverse"/"R" keeps only that polarity;
    ``None`` keeps both.
    """
    j = DEVICES.index(device.upper())
    i = trace.i_dev[:, j]
    if direction is not None:
        d = direction.strip().lower()
        if d in ("f", "fwd", "forward"):
            i = np.where(i > 0, i, 0.0)
        elif d in ("r", "rev", "reverse"):
            i = np.where(i < 0, i, 0.0)
        else:
            raise ValueError(f"direction must be forward or reverse, got {direction!r}")
    return float(np.sqrt(np.mean(i**2)))


def simulated_losses(
    trace: SimTrace, device_params: DeviceParams, e_on: EnergyCurve, e_off: EnergyCurve
) -> LossReport:
    cfg = trace.config
    on = np.zeros(6)
    off = np.zeros(6)
    for ev in trace.events:
        if not ev.hard:
            continue
        j = DEVICES.index(ev.device)
        if ev.edge == "on":
            on[j] += energy_at(e_on, ev.i_ds)
        else:
            off[j] += energy_at(e_off, ev.i_ds)
    devices = {}
    for j, dev in enumerate(DEVICES):
        f = trace_rms(trace, dev, "F")
        r = trace_rms(trace, dev, "R")
        p_cond = (f**2 + r**2) * device_params.rds_on
        if cfg.include_reverse_conduction_drop:
            # third-quadrant conduction with the channel off adds a source-drain drop
            off_rev = (~trace.gates[:, j]) & (trace.i_dev[:, j] < 0)
            p_cond += cfg.reverse_drop_v * float(np.mean(np.where(off_rev, -trace.i_dev[:, j], 0.0)))
        devices[dev] = DeviceLoss(f, r, p_cond, cfg.op.f_e * float(on[j] + off[j]))
    return LossReport(cfg.strategy, devices, op=cfg.op, source="simulated")


@dataclass(frozen=True)
class Comparison:
    strategy: Strategy
    device_errors: dict[str, float]
    leg_error: float
    analytic_total: float
    simulated_total: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.leg_error <= self.threshold


def _rel(a: float, s: float) -> float:
    if s == 0:
        return 0.0 if a == 0 else math.inf
    return abs(a - s) / abs(s)


def compare_reports(analytic: LossReport, simulated: LossReport, threshold: float = 0.03) -> Comparison:
    """Relative error ``|analytic - simulated| / simulated`` per device and for the leg."""
    if analytic.strategy is not simulated.strategy:
        raise ValueError(f"strategies differ: {analytic.strategy.value} vs {simulated.strategy.value}")
    if analytic.op is not None and simulated.op is not None and analytic.op != simulated.op:
        raise ValueError("reports were computed at different operating points")
    if not threshold >= 0:
        raise ValueError("threshold must be >= 0")
    errs = {d: _rel(analytic.devices[d].p_total, simulated.devices[d].p_total) for d in DEVICES}
    return Comparison(
        analytic.strategy,
        errs,
        _rel(analytic.leg_total, simulated.leg_total),
        analytic.leg_total,
        simulated.leg_total,
        threshold,
    )
