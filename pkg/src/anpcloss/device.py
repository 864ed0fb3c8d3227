"""GaN HEMT parameters and switching-energy curves.

Switching energy per edge is modelled as a power law ``E = a * |I|**b`` measured
at a fixed junction temperature (25 degC). Curves can be fitted from sampled
datasheet points with :func:`fit_power_law`.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DeviceParams",
    "EnergyCurve",
    "EnergySample",
    "FitResult",
    "DEFAULT_DEVICE",
    "DEFAULT_E_ON",
    "DEFAULT_E_OFF",
    "energy_at",
    "switch_power",
    "fit_power_law",
    "read_samples_csv",
    "write_curve_file",
    "read_curve_file",
]


@dataclass(frozen=True)
class DeviceParams:
    """Electrical ratings of one HEMT. Only ``rds_on`` enters the loss model."""

    rds_on: float
    v_ds_max: float
    i_d_rated: float
    v_gs_on: float = 6.0
    v_gs_off: float = -3.0

    def __post_init__(self):
        for name in ("rds_on", "v_ds_max", "i_d_rated"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive, got {value!r}")


@dataclass(frozen=True)
class EnergyCurve:
    """Switching energy ``coeff_a * |I| ** exponent_b`` in joule."""

    coeff_a: float
    exponent_b: float

    def __post_init__(self):
        if not (math.isfinite(self.coeff_a) and self.coeff_a >= 0):
            raise ValueError(f"coeff_a must be >= 0, got {self.coeff_a!r}")
        if not (math.isfinite(self.exponent_b) and self.exponent_b > 0):
            raise ValueError(f"exponent_b must be > 0, got {self.exponent_b!r}")

    def __call__(self, i_ds):
        return energy_at(self, i_ds)


@dataclass(frozen=True)
class EnergySample:
    current: float
    energy: float

    def __post_init__(self):
        if not self.current >= 0:
            raise ValueError(f"sample current must be >= 0, got {self.current!r}")
        if not self.energy >= 0:
            raise ValueError(f"sample energy must be >= 0, got {self.energy!r}")


@dataclass(frozen=True)
class FitResult:
    curve: EnergyCurve
    residuals: tuple[float, ...] = field(default=())  # log-domain, per used sample
    rms_log_residual: float = 0.0


# 650 V / 10 A / 65 mOhm part, gate drive +6 V / -3 V
DEFAULT_DEVICE = DeviceParams(rds_on=65e-3, v_ds_max=650.0, i_d_rated=10.0)
DEFAULT_E_ON = EnergyCurve(1.0527e-6, 1.6291)
DEFAULT_E_OFF = EnergyCurve(2.542e-6, 1.1738)


def energy_at(curve: EnergyCurve, i_ds):
    """Energy dissipated by one edge at drain current ``i_ds`` (sign ignored).

    Works on scalars and numpy arrays.
    """
    mag = np.abs(i_ds)
    out = curve.coeff_a * np.power(mag, curve.exponent_b)
    if np.ndim(out) == 0:
        return float(out)
    return out


def switch_power(curve: EnergyCurve, i_ds, f_sw: float):
    """Average power of one edge type repeated every switching period."""
    if not f_sw > 0:
        raise ValueError(f"switching frequency must be positive, got {f_sw!r}")
    return energy_at(curve, i_ds) * f_sw


def fit_power_law(samples: Iterable[EnergySample]) -> FitResult:
    """Least-squares fit of ``log E = log a + b log I``.

    Samples with zero current or zero energy carry no information in the log
    domain and are dropped before the fit.
    """
    samples = list(samples)
    used = [s for s in samples if s.current > 0 and s.energy > 0]
    if samples and all(s.energy == 0 for s in samples):
        raise ValueError("all sample energies are zero")
    if len(used) < 3:
        raise ValueError(f"need at least 3 samples with positive current and energy, got {len(used)}")
    x = np.log([s.current for s in used])
    y = np.log([s.energy for s in used])
    if np.unique(x).size < len(x):
        raise ValueError("sample currents must be distinct")

    design = np.column_stack([np.ones_like(x), x])
    (log_a, b), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ np.array([log_a, b])
    curve = EnergyCurve(float(np.exp(log_a)), float(b))
    return FitResult(curve, tuple(float(r) for r in resid), float(np.sqrt(np.mean(resid**2))))


def read_samples_csv(path: str | Path) -> list[EnergySample]:
    """Read ``current_a,energy_j`` rows. Errors name the offending line."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        if [h.strip() for h in header] != ["current_a", "energy_j"]:
            raise ValueError(f"{path}:1: expected header 'current_a,energy_j', got {','.join(header)!r}")
        samples = []
        for row in reader:
            lineno = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise ValueError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            try:
                samples.append(EnergySample(float(row[0]), float(row[1])))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return samples


def write_curve_file(path: str | Path, curve: EnergyCurve, residuals: Sequence[float] = ()) -> None:
    lines = [
        "# power-law switching energy: E = coeff_a * |I| ** exponent_b  [J]",
        f"coeff_a = {curve.coeff_a!r}",
        f"exponent_b = {curve.exponent_b!r}",
    ]
    if residuals:
        lines.append("log_residuals = [" + ", ".join(repr(float(r)) for r in residuals) + "]")
    Path(path).write_text("\n".join(lines) + "\n")


def read_curve_file(path: str | Path) -> EnergyCurve:
    from .config import load_toml

    data = load_toml(path)
    try:
        return EnergyCurve(float(data["coeff_a"]), float(data["exponent_b"]))
    except KeyError as exc:
        raise ValueError(f"{path}: missing key {exc.args[0]!r}") from None
