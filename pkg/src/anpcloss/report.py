"""Loss report value types and their CSV form."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .modulation import DEVICES, Strategy
from .operating import OperatingPoint

__all__ = ["DeviceLoss", "LossReport", "REPORT_HEADER", "format_report_csv", "parse_report_csv"]

REPORT_HEADER = ("strategy", "device", "rms_fwd_a", "rms_rev_a", "p_cond_w", "p_sw_w", "p_total_w")


@dataclass(frozen=True)
class DeviceLoss:
    rms_fwd: float
    rms_rev: float
    p_cond: float
    p_sw: float

    def __post_init__(self):
        for name in ("rms_fwd", "rms_rev", "p_cond", "p_sw"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)!r}")

    @property
    def p_total(self) -> float:
        return self.p_cond + self.p_sw


@dataclass(frozen=True)
class LossReport:
    strategy: Strategy
    devices: dict[str, DeviceLoss]
    op: Optional[OperatingPoint] = None
    source: str = "analytic"
    notes: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if set(self.devices) != set(DEVICES):
            raise ValueError(f"report needs exactly devices {DEVICES}, got {sorted(self.devices)}")

    @property
    def leg_total(self) -> float:
        return sum(self.devices[d].p_total for d in DEVICES)

    @property
    def conduction_total(self) -> float:
        return sum(self.devices[d].p_cond for d in DEVICES)

    @property
    def switching_total(self) -> float:
        return sum(self.devices[d].p_sw for d in DEVICES)


def _rows(reports: Iterable[LossReport]):
    for rep in reports:
        for dev in DEVICES:
            d = rep.devices[dev]
            yield (rep.strategy.value, dev, d.rms_fwd, d.rms_rev, d.p_cond, d.p_sw, d.p_total)


def format_report_csv(reports: Iterable[LossReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_HEADER)
    for row in _rows(reports):
        writer.writerow([row[0], row[1], *(repr(float(x)) for x in row[2:])])
    return buf.getvalue()


def parse_report_csv(text_or_path, source: str = "csv") -> dict[Strategy, LossReport]:
    """Inverse of :func:`format_report_csv`; the total column is checked, not stored."""
    if isinstance(text_or_path, Path):
        text = text_or_path.read_text()
    else:
        text = text_or_path
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != REPORT_HEADER:
        raise ValueError(f"unexpected report header {header!r}")
    per_strategy: dict[Strategy, dict[str, DeviceLoss]] = {}
    for row in reader:
        if not row:
            continue
        lineno = reader.line_num
        if len(row) != len(REPORT_HEADER):
            raise ValueError(f"line {lineno}: expected {len(REPORT_HEADER)} columns, got {len(row)}")
        strat = Strategy.parse(row[0])
        f_rms, r_rms, p_cond, p_sw, p_tot = (float(x) for x in row[2:])
        if abs(p_cond + p_sw - p_tot) > 1e-12 * max(1.0, abs(p_tot)):
            raise ValueError(f"line {lineno}: p_total_w != p_cond_w + p_sw_w")
        per_strategy.setdefault(strat, {})[row[1]] = DeviceLoss(f_rms, r_rms, p_cond, p_sw)
    return {s: LossReport(s, devs, source=source) for s, devs in per_strategy.items()}
