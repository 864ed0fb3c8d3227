"""Averaged loss model of one ANPC leg.

Conduction: per-device forward and reverse RMS currents from duty-weighted
integrals of the squared load current, either in closed form (sinusoidal
reference) or by adaptive quadrature, times the channel resistance.

Switching: carrier-period averaged turn-on plus turn-off energy of the
hard-switched device, integrated over the angles where it commutates.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate

from .device import DeviceParams, EnergyCurve, energy_at
from .modulation import (
    DEVICES,
    CommutationEvent,
    ReferenceKind,
    Strategy,
    fundamental_vs_switching_classification,
    reference_value,
)
from .operating import OperatingPoint, load_current
from .report import DeviceLoss, LossReport
from .tables import CLOSED_FORMS, DUTY_TABLE, HARD_SWITCHING, MIRROR, quadrant_intervals

__all__ = [
    "DutySegment",
    "ConductionEntry",
    "ThreePhaseReport",
    "load_current",
    "duty_profile",
    "rms_quadrature",
    "rms_closed_form",
    "conduction_entries",
    "conduction_loss",
    "hard_switching_intervals",
    "hard_switched_events",
    "switching_loss_discrete",
    "switching_loss_continuous",
    "average_switching_power",
    "leg_report",
    "three_phase_report",
    "carrier_intervals",
    "carrier_rate_devices",
    "shift_segments",
]

DIRECTIONS = ("F", "R")
QUAD_RTOL = 1e-9
TWO_PI = 2 * math.pi


def _direction(direction: str) -> str:
    d = direction.strip().lower()
    if d in ("f", "fwd", "forward"):
        return "F"
    if d in ("r", "rev", "reverse"):
        return "R"
    raise ValueError(f"direction must be forward or reverse, got {direction!r}")


def _device(device: str) -> str:
    d = device.strip().upper()
    if d not in DEVICES:
        raise ValueError(f"unknown device {device!r}")
    return d


@dataclass(frozen=True)
class DutySegment:
    """Conduction fraction ``duty(theta)`` on ``start < theta < stop``.

    ``share`` is the fraction of the load current the device carries there.
    Segments of one device with the same share never overlap.
    """

    duty: Callable[[float], float]
    start: float
    stop: float
    share: float = 1.0
    law: str = ""

    def weight(self, theta):
        return self.duty(theta) * self.share**2


@dataclass(frozen=True)
class ConductionEntry:
    device: str
    direction: str
    segments: tuple[DutySegment, ...]
    rms_closed_form: float
    rms_quadrature: float
    corrected: bool

    @property
    def discrepancy(self) -> float:
        return abs(self.rms_closed_form - self.rms_quadrature) / max(self.rms_quadrature, 1e-300)


def _duty_law(law: str, m: float, kind: ReferenceKind) -> Callable[[float], float]:
    if law == "1":
        return lambda th: 1.0
    if law == "v":
        return lambda th: reference_value(th, m, kind)
    if law == "1-v":
        return lambda th: 1.0 - reference_value(th, m, kind)
    if law == "1+v":
        return lambda th: 1.0 + reference_value(th, m, kind)
    raise ValueError(f"unknown duty law {law!r}")


def shift_segments(segments: Iterable[DutySegment], delta: float) -> list[DutySegment]:
    """Move segments by ``delta`` radian, wrapping into [0, 2 pi)."""
    out = []
    for seg in segments:
        if seg.stop <= seg.start:
            continue
        a = seg.start + delta
        k = math.floor(a / TWO_PI)
        a -= k * TWO_PI
        b = a + (seg.stop - seg.start)
        duty = seg.duty

        def shifted(th, duty=duty):
            return duty(th - delta)

        if b <= TWO_PI + 1e-15:
            out.append(DutySegment(shifted, a, min(b, TWO_PI), seg.share, seg.law))
        else:
            out.append(DutySegment(shifted, a, TWO_PI, seg.share, seg.law))
            out.append(DutySegment(shifted, 0.0, b - TWO_PI, seg.share, seg.law))
    return out


def duty_profile(
    strategy: Strategy,
    device: str,
    direction: str,
    m: float,
    phi: float,
    kind: ReferenceKind = ReferenceKind.SINUSOIDAL,
) -> list[DutySegment]:
    """Conduction segments of one device in one direction over a period."""
    strategy = Strategy(strategy)
    device, direction = _device(device), _direction(direction)
    kind = ReferenceKind(kind)
    if not 0.0 <= m <= kind.m_max:
        raise ValueError(f"m={m!r} outside [0, {kind.m_max}] for {kind.value} reference")
    if device in MIRROR:
        return shift_segments(duty_profile(strategy, MIRROR[device], direction, m, phi, kind), math.pi)
    quads = quadrant_intervals(phi)
    try:
        rows = DUTY_TABLE[strategy][(device, direction)]
    except KeyError:
        raise ValueError(f"no duty profile for {strategy.value} {device}{direction}") from None
    segs = []
    for quad, law, share in rows:
        a, b = quads[quad]
        if b > a:
            segs.append(DutySegment(_duty_law(law, m, kind), a, b, share, law))
    return segs


def _quad(f, a, b):
    if b - a <= 1e-12:
        # sliver left by two cut points that differ only by rounding
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            # integrands are per-unit (|f| <= ~1): a 1e-16 floor only matters for vanishing pieces
            val, _ = integrate.quad(f, a, b, epsabs=1e-16, epsrel=QUAD_RTOL * 0.1, limit=200)
        except integrate.IntegrationWarning as exc:
            raise ArithmeticError(f"quadrature did not converge on ({a}, {b}): {exc}") from None
    return val


def rms_quadrature(segments: Sequence[DutySegment], op: OperatingPoint, theta_offset: float = 0.0) -> float:
    """RMS device current by numerical integration of the duty-weighted i^2.

    ``theta_offset`` delays the load current, for legs whose reference is
    shifted by the same angle.
    """
    if op.i_peak == 0:
        return 0.0
    total = 0.0
    for seg in segments:
        if seg.stop <= seg.start:
            continue
        total += _quad(lambda th, seg=seg: seg.weight(th) * math.sin(th - theta_offset - op.phi) ** 2, seg.start, seg.stop)
    return op.i_peak * math.sqrt(max(total, 0.0) / TWO_PI)


def rms_closed_form(strategy: Strategy, device: str, direction: str, op: OperatingPoint, printed: bool = False) -> float:
    """RMS current from the tabulated closed form (sinusoidal reference).

    Entries whose printed expression disagrees with the integral of the duty
    profile return the re-derived expression, unless ``printed`` is set.
    """
    strategy = Strategy(strategy)
    device, direction = _device(device), _direction(direction)
    if op.m > 1.0:
        raise ValueError(f"closed forms need a sinusoidal reference with m <= 1, got m={op.m!r}")
    if op.phi > math.pi:
        raise ValueError("closed forms cover lagging current, 0 <= phi <= pi")
    entry = CLOSED_FORMS[strategy][(MIRROR.get(device, device), direction)]
    fn = entry.derived
    if printed:
        if entry.printed is None:
            raise ValueError(f"{strategy.value} {device}{direction} has no printed expression")
        fn = entry.printed
    bracket = fn(op.m, op.phi)
    if bracket < 0:
        # can only happen for printed expressions; rounding on the derived ones
        if printed or bracket < -1e-12:
            return math.nan
        bracket = 0.0
    return op.i_peak / math.sqrt(TWO_PI) * math.sqrt(bracket)


def conduction_entries(
    strategy: Strategy,
    op: OperatingPoint,
    kind: ReferenceKind = ReferenceKind.SINUSOIDAL,
    devices: Sequence[str] = DEVICES,
) -> list[ConductionEntry]:
    strategy = Strategy(strategy)
    out = []
    for dev in devices:
        for d in DIRECTIONS:
            segs = tuple(duty_profile(strategy, dev, d, op.m, op.phi, kind))
            quad = rms_quadrature(segs, op)
            closed = math.nan
            corrected = False
            if kind is ReferenceKind.SINUSOIDAL and op.phi <= math.pi:
                closed = rms_closed_form(strategy, dev, d, op)
                corrected = CLOSED_FORMS[strategy][(MIRROR.get(dev, dev), d)].corrected
            out.append(ConductionEntry(dev, d, segs, closed, quad, corrected))
    return out


def conduction_loss(params: DeviceParams, rms_forward: float, rms_reverse: float) -> float:
    """Channel loss; reverse conduction also goes through the channel resistance."""
    return (rms_forward**2 + rms_reverse**2) * params.rds_on


def hard_switching_intervals(strategy: Strategy, device: str, phi: float) -> list[tuple[float, float, float]]:
    """``(start, stop, share)`` ranges where ``device`` is hard-switched at carrier rate."""
    strategy = Strategy(strategy)
    device = _device(device)
    if device in MIRROR:
        out = []
        for a, b, share in hard_switching_intervals(strategy, MIRROR[device], phi):
            a2 = a + math.pi
            b2 = b + math.pi
            if a2 >= TWO_PI:
                out.append((a2 - TWO_PI, b2 - TWO_PI, share))
            elif b2 > TWO_PI:
                out.append((a2, TWO_PI, share))
                out.append((0.0, b2 - TWO_PI, share))
            else:
                out.append((a2, b2, share))
        return out
    quads = quadrant_intervals(phi)
    return [(*quads[q], share) for q, share in HARD_SWITCHING[strategy][device] if quads[q][1] > quads[q][0]]


def hard_switched_events(strategy: Strategy, events: Iterable[CommutationEvent], op: OperatingPoint) -> list[CommutationEvent]:
    """Mark which gate edges dissipate and scale their current by the path share."""
    strategy = Strategy(strategy)
    ranges = {dev: hard_switching_intervals(strategy, dev, op.phi) for dev in DEVICES}
    out = []
    for ev in events:
        hard, share = False, 1.0
        for a, b, sh in ranges[ev.device]:
            if a <= ev.theta < b:
                hard, share = True, sh
                break
        i_ds = share * abs(load_current(ev.theta, op)) if hard else ev.i_ds
        out.append(CommutationEvent(ev.device, ev.theta, ev.edge, i_ds, hard))
    return out


def switching_loss_discrete(
    events: Iterable[CommutationEvent], e_on: EnergyCurve, e_off: EnergyCurve, f_e: float
) -> dict[str, float]:
    """Energy of all hard edges in one fundamental period times ``f_e``."""
    totals = dict.fromkeys(DEVICES, 0.0)
    for ev in events:
        if not ev.hard:
            continue
        curve = e_on if ev.edge == "on" else e_off
        totals[ev.device] += energy_at(curve, ev.i_ds)
    return {dev: f_e * e for dev, e in totals.items()}


def average_switching_power(
    on_currents: Sequence[float],
    off_currents: Sequence[float],
    e_on: EnergyCurve,
    e_off: EnergyCurve,
    f_sw: float,
    fraction: float,
) -> float:
    """Mean of per-commutation ``P_on + P_off`` weighted by the active fraction.

    ``n`` on/off pairs, each powered at ``f_sw``, averaged and scaled by the
    share of the fundamental period during which the device is modulated.
    """
    if len(on_currents) != len(off_currents) or len(on_currents) == 0:
        raise ValueError("need the same non-zero number of turn-on and turn-off currents")
    p_on = np.asarray(energy_at(e_on, np.asarray(on_currents, dtype=float))) * f_sw
    p_off = np.asarray(energy_at(e_off, np.asarray(off_currents, dtype=float))) * f_sw
    return float(np.sum(p_on + p_off) / len(on_currents) * fraction)


def carrier_intervals(strategy: Strategy, device: str) -> list[tuple[float, float]]:
    """Half-periods in which ``device`` toggles at carrier rate."""
    halves = fundamental_vs_switching_classification(strategy)[_device(device)].carrier_halves
    spans = {"positive": (0.0, math.pi), "negative": (math.pi, TWO_PI)}
    return [spans[h] for h in halves]


def switching_loss_continuous(
    strategy: Strategy,
    device: str,
    op: OperatingPoint,
    e_on: EnergyCurve,
    e_off: EnergyCurve,
    model: str = "hard",
) -> float:
    """High carrier-ratio limit of the switching energy sum.

    ``model="hard"`` integrates over the angles where the device hard-switches,
    at its share of the load current. ``model="gate"`` charges every carrier-rate
    gate edge at the full load current, matching unrefined
    :func:`~anpcloss.modulation.commutation_events`.
    """
    if model == "hard":
        ranges = hard_switching_intervals(strategy, device, op.phi)
    elif model == "gate":
        ranges = [(a, b, 1.0) for a, b in carrier_intervals(strategy, device)]
    else:
        raise ValueError(f"model must be 'hard' or 'gate', got {model!r}")
    if op.i_peak == 0:
        return 0.0
    total = 0.0
    for a, b, share in ranges:
        def f(th, share=share):
            i = share * abs(op.i_peak * math.sin(th - op.phi))
            return e_on.coeff_a * i**e_on.exponent_b + e_off.coeff_a * i**e_off.exponent_b

        # the current magnitude has a kink at its zero crossing
        cuts = sorted({a, b, *(z for z in (op.phi, op.phi + math.pi, op.phi - math.pi) if a < z < b)})
        total += sum(_quad(f, lo, hi) for lo, hi in zip(cuts, cuts[1:]))
    return op.f_sw / TWO_PI * total


def leg_report(
    strategy: Strategy,
    op: OperatingPoint,
    device_params: DeviceParams,
    e_on: EnergyCurve,
    e_off: EnergyCurve,
    kind: ReferenceKind = ReferenceKind.SINUSOIDAL,
) -> LossReport:
    """Per-device conduction and switching loss of one leg.

    Upper devices are computed; lower ones copy their mirror partner.
    Closed forms are used for a sinusoidal reference, quadrature otherwise.
    """
    strategy = Strategy(strategy)
    kind = ReferenceKind(kind)
    use_closed = kind is ReferenceKind.SINUSOIDAL and op.phi <= math.pi
    notes = []
    devices = {}
    for dev in ("S1", "S2", "S5"):
        rms = {}
        for d in DIRECTIONS:
            if use_closed:
                rms[d] = rms_closed_form(strategy, dev, d, op)
                if CLOSED_FORMS[strategy][(dev, d)].corrected:
                    notes.append(f"{dev}{d}: re-derived closed form")
            else:
                rms[d] = rms_quadrature(duty_profile(strategy, dev, d, op.m, op.phi, kind), op)
        devices[dev] = DeviceLoss(
            rms_fwd=rms["F"],
            rms_rev=rms["R"],
            p_cond=conduction_loss(device_params, rms["F"], rms["R"]),
            p_sw=switching_loss_continuous(strategy, dev, op, e_on, e_off),
        )
    for low, high in MIRROR.items():
        devices[low] = devices[high]
    return LossReport(strategy, {d: devices[d] for d in DEVICES}, op=op, source="analytic", notes=tuple(notes))


@dataclass(frozen=True)
class ThreePhaseReport:
    legs: dict[str, LossReport]

    @property
    def inverter_total(self) -> float:
        return sum(leg.leg_total for leg in self.legs.values())


def three_phase_report(
    strategy: Strategy,
    op: OperatingPoint,
    device_params: DeviceParams,
    e_on: EnergyCurve,
    e_off: EnergyCurve,
    kind: ReferenceKind = ReferenceKind.SINUSOIDAL,
    recompute: bool = False,
) -> ThreePhaseReport:
    """Balanced three-phase inverter: three legs with references 120 degrees apart.

    By default the first leg is reused for the other two. With ``recompute``
    every leg is integrated again on its own shifted angle grid.
    """
    leg_a = leg_report(strategy, op, device_params, e_on, e_off, kind)
    if not recompute:
        return ThreePhaseReport({"A": leg_a, "B": leg_a, "C": leg_a})
    legs = {"A": leg_a}
    for name, k in (("B", 1), ("C", 2)):
        legs[name] = _shifted_leg(strategy, op, device_params, e_on, e_off, kind, k * TWO_PI / 3)
    return ThreePhaseReport(legs)


def _shifted_leg(strategy, op, params, e_on, e_off, kind, delta) -> LossReport:
    devices = {}
    for dev in DEVICES:
        rms = {
            d: rms_quadrature(shift_segments(duty_profile(strategy, dev, d, op.m, op.phi, kind), delta), op, theta_offset=delta)
            for d in DIRECTIONS
        }
        p_sw = 0.0
        if op.i_peak:
            for a, b, share in hard_switching_intervals(strategy, dev, op.phi):
                seg = DutySegment(lambda th: 1.0, a, b, share)
                for s in shift_segments([seg], delta):
                    def f(th, share=s.share):
                        i = share * abs(op.i_peak * math.sin(th - delta - op.phi))
                        return energy_at(e_on, i) + energy_at(e_off, i)

                    p_sw += _quad(f, s.start, s.stop)
            p_sw *= op.f_sw / TWO_PI
        devices[dev] = DeviceLoss(rms["F"], rms["R"], conduction_loss(params, rms["F"], rms["R"]), p_sw)
    return LossReport(Strategy(strategy), devices, op=op, source="analytic")


def carrier_rate_devices(strategy: Strategy) -> list[str]:
    cls = fundamental_vs_switching_classification(strategy)
    return [d for d in DEVICES if cls[d].rate == "carrier"]
