"""Run configuration: flat dotted keys in a TOML file plus command-line overrides.

Both ``operating.m = 0.7`` and an ``[operating]`` table with ``m = 0.7`` are
accepted; everything is flattened to dotted keys before validation. Unknown
keys are rejected.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .device import DEFAULT_DEVICE, DEFAULT_E_OFF, DEFAULT_E_ON, DeviceParams, EnergyCurve
from .modulation import MIN_RATIO, ReferenceKind, Strategy
from .operating import OperatingPoint

__all__ = ["ConfigError", "RunConfig", "SCHEMA", "load_toml", "build_config", "load_config", "parse_value"]


class ConfigError(ValueError):
    """Invalid configuration. ``key`` names the offending entry when known."""

    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


def load_toml(path) -> dict:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from None


def _flatten(data: Mapping, prefix: str = "") -> dict[str, Any]:
    out = {}
    for k, v in data.items():
        key = f"{prefix}{k}"
        if isinstance(v, Mapping):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


# --- value coercion -------------------------------------------------------

def _float(v):
    if isinstance(v, bool):
        raise ValueError("expected a number, got a boolean")
    if isinstance(v, str):
        v = v.strip()
    x = float(v)
    if not math.isfinite(x):
        raise ValueError(f"expected a finite number, got {v!r}")
    return x


def _int(v):
    if isinstance(v, bool):
        raise ValueError("expected an integer, got a boolean")
    if isinstance(v, float) and not v.is_integer():
        raise ValueError(f"expected an integer, got {v!r}")
    return int(v)


def _bool(v):
    if isinstance(v, bool):
        return v
    if isinstance(v, str) and v.strip().lower() in ("true", "yes", "1", "on"):
        return True
    if isinstance(v, str) and v.strip().lower() in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected true/false, got {v!r}")


def _str(v):
    if not isinstance(v, str):
        raise ValueError(f"expected a string, got {v!r}")
    return v


def _list_of(conv):
    def coerce(v):
        if isinstance(v, str):
            v = [p for p in (s.strip() for s in v.split(",")) if p]
        if not isinstance(v, (list, tuple)):
            v = [v]
        return tuple(conv(x) for x in v)

    return coerce


def _strategy(v):
    return Strategy.parse(_str(v))


def _reference(v):
    return ReferenceKind.parse(_str(v))


@dataclass(frozen=True)
class _Key:
    default: Any
    coerce: Callable[[Any], Any]
    help: str


SCHEMA: dict[str, _Key] = {
    "device.rds_on": _Key(DEFAULT_DEVICE.rds_on, _float, "channel on-resistance [ohm]"),
    "device.v_ds_max": _Key(DEFAULT_DEVICE.v_ds_max, _float, "drain-source voltage rating [V]"),
    "device.i_d_rated": _Key(DEFAULT_DEVICE.i_d_rated, _float, "continuous drain current rating [A]"),
    "device.v_gs_on": _Key(DEFAULT_DEVICE.v_gs_on, _float, "gate drive on level [V]"),
    "device.v_gs_off": _Key(DEFAULT_DEVICE.v_gs_off, _float, "gate drive off level [V]"),
    "energy.on_a": _Key(DEFAULT_E_ON.coeff_a, _float, "turn-on energy coefficient [J/A^b]"),
    "energy.on_b": _Key(DEFAULT_E_ON.exponent_b, _float, "turn-on energy exponent"),
    "energy.off_a": _Key(DEFAULT_E_OFF.coeff_a, _float, "turn-off energy coefficient [J/A^b]"),
    "energy.off_b": _Key(DEFAULT_E_OFF.exponent_b, _float, "turn-off energy exponent"),
    "energy.on_curve": _Key("", _str, "curve file from fit-energy, overrides on_a/on_b"),
    "energy.off_curve": _Key("", _str, "curve file from fit-energy, overrides off_a/off_b"),
    "energy.on_samples": _Key("", _str, "current_a,energy_j CSV fitted at load time"),
    "energy.off_samples": _Key("", _str, "current_a,energy_j CSV fitted at load time"),
    "operating.m": _Key(0.7, _float, "amplitude modulation index"),
    "operating.cos_phi": _Key(0.9, _float, "displacement power factor (lagging)"),
    "operating.i_peak": _Key(3.0, _float, "load current amplitude [A]"),
    "operating.v_dc": _Key(200.0, _float, "DC-link voltage [V]"),
    "operating.f_e": _Key(50.0, _float, "fundamental frequency [Hz]"),
    "operating.f_sw": _Key(50e3, _float, "carrier frequency [Hz]"),
    "operating.load_r": _Key(20.65, _float, "load resistance, informational [ohm]"),
    "operating.load_l": _Key(1e-3, _float, "load inductance, informational [H]"),
    "analysis.strategies": _Key(tuple(Strategy), _list_of(_strategy), "strategies to evaluate"),
    "analysis.reference": _Key(ReferenceKind.SINUSOIDAL, _reference, "sinusoidal | thi"),
    "analysis.threshold": _Key(0.03, _float, "compare pass threshold (relative)"),
    "simulator.dead_time": _Key(0.0, _float, "dead time [s]"),
    "simulator.steps_per_carrier": _Key(256, _int, "time steps per carrier period"),
    "simulator.reverse_drop": _Key(False, _bool, "add source-drain drop in reverse conduction"),
    "simulator.reverse_drop_v": _Key(4.5, _float, "reverse conduction drop [V]"),
    "sweep.m": _Key((0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0), _list_of(_float), "modulation index grid"),
    "sweep.cos_phi": _Key((0.9,), _list_of(_float), "power factor grid"),
    "sweep.i_peak": _Key((3.0,), _list_of(_float), "current amplitude grid [A]"),
    "sweep.simulate": _Key(False, _bool, "add simulated RMS columns"),
    "patterns.steps_per_period": _Key(20000, _int, "rows in the pattern CSV"),
    "output.dir": _Key("out", _str, "output directory"),
}


def parse_value(key: str, raw: Any) -> Any:
    if key not in SCHEMA:
        raise ConfigError("unknown key", key)
    try:
        return SCHEMA[key].coerce(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc), key) from None


@dataclass(frozen=True)
class RunConfig:
    values: Mapping[str, Any] = field(default_factory=dict)
    base_dir: Path = Path(".")
    # resolved domain objects, filled by build_config()
    device: DeviceParams = DEFAULT_DEVICE
    e_on: EnergyCurve = DEFAULT_E_ON
    e_off: EnergyCurve = DEFAULT_E_OFF
    op: Optional[OperatingPoint] = None

    def __getitem__(self, key: str):
        return self.values[key]

    @property
    def strategies(self) -> tuple[Strategy, ...]:
        return self.values["analysis.strategies"]

    @property
    def reference(self) -> ReferenceKind:
        return self.values["analysis.reference"]

    @property
    def threshold(self) -> float:
        return self.values["analysis.threshold"]

    @property
    def out_dir(self) -> Path:
        # relative to the working directory, unlike input files
        return Path(self.values["output.dir"])

    def with_values(self, **updates) -> "RunConfig":
        """Copy with dotted-key updates given as ``{"operating__m": 0.5}``."""
        vals = dict(self.values)
        for k, v in updates.items():
            key = k.replace("__", ".")
            vals[key] = parse_value(key, v)
        return build_config(vals, self.base_dir)


def _curve(vals, prefix, base_dir, default_a, default_b) -> EnergyCurve:
    from .device import fit_power_law, read_curve_file, read_samples_csv

    curve_file = vals[f"energy.{prefix}_curve"]
    samples = vals[f"energy.{prefix}_samples"]
    if curve_file and samples:
        raise ConfigError("give either a curve file or a samples file, not both", f"energy.{prefix}_curve")
    try:
        if curve_file:
            p = Path(curve_file)
            return read_curve_file(p if p.is_absolute() else base_dir / p)
        if samples:
            p = Path(samples)
            return fit_power_law(read_samples_csv(p if p.is_absolute() else base_dir / p)).curve
    except OSError as exc:
        key = f"energy.{prefix}_curve" if curve_file else f"energy.{prefix}_samples"
        raise ConfigError(exc.strerror or str(exc), key) from None
    except ValueError as exc:
        key = f"energy.{prefix}_curve" if curve_file else f"energy.{prefix}_samples"
        raise ConfigError(str(exc), key) from None
    try:
        return EnergyCurve(vals[f"energy.{prefix}_a"], vals[f"energy.{prefix}_b"])
    except ValueError as exc:
        raise ConfigError(str(exc), f"energy.{prefix}_a") from None


def _check(cond: bool, key: str, msg: str):
    if not cond:
        raise ConfigError(msg, key)


def build_config(values: Mapping[str, Any], base_dir: Path = Path(".")) -> RunConfig:
    """Fill defaults, coerce, and check every precondition up front."""
    vals = {k: parse_value(k, v) for k, v in values.items()}
    for k, entry in SCHEMA.items():
        vals.setdefault(k, entry.default)

    _check(len(vals["analysis.strategies"]) > 0, "analysis.strategies", "at least one strategy is required")
    _check(len(set(vals["analysis.strategies"])) == len(vals["analysis.strategies"]), "analysis.strategies", "duplicate strategy")
    _check(vals["analysis.threshold"] >= 0, "analysis.threshold", "must be >= 0")
    _check(vals["simulator.dead_time"] >= 0, "simulator.dead_time", "must be >= 0")
    _check(vals["simulator.steps_per_carrier"] >= 64, "simulator.steps_per_carrier", "must be >= 64")
    _check(vals["simulator.reverse_drop_v"] >= 0, "simulator.reverse_drop_v", "must be >= 0")
    _check(vals["patterns.steps_per_period"] >= 2, "patterns.steps_per_period", "must be >= 2")
    _check(vals["operating.load_r"] >= 0, "operating.load_r", "must be >= 0")
    _check(vals["operating.load_l"] >= 0, "operating.load_l", "must be >= 0")
    m_max = vals["analysis.reference"].m_max
    ref = vals["analysis.reference"].value

    def check_point(prefix, m, cos_phi, i_peak):
        _check(0 <= m <= m_max, f"{prefix}.m", f"m={m!r} outside [0, {m_max}] for {ref} reference")
        _check(-1 <= cos_phi <= 1, f"{prefix}.cos_phi", f"cos_phi={cos_phi!r} outside [-1, 1]")
        _check(i_peak >= 0, f"{prefix}.i_peak", f"i_peak={i_peak!r} must be >= 0")

    check_point("operating", vals["operating.m"], vals["operating.cos_phi"], vals["operating.i_peak"])
    for name in ("m", "cos_phi", "i_peak"):
        _check(len(vals[f"sweep.{name}"]) > 0, f"sweep.{name}", "grid must not be empty")
    for m in vals["sweep.m"]:
        check_point("sweep", m, 0.0, 0.0)
    for c in vals["sweep.cos_phi"]:
        check_point("sweep", 0.0, c, 0.0)
    for i in vals["sweep.i_peak"]:
        check_point("sweep", 0.0, 0.0, i)

    try:
        device = DeviceParams(
            rds_on=vals["device.rds_on"],
            v_ds_max=vals["device.v_ds_max"],
            i_d_rated=vals["device.i_d_rated"],
            v_gs_on=vals["device.v_gs_on"],
            v_gs_off=vals["device.v_gs_off"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc), "device") from None
    try:
        op = OperatingPoint.from_cos_phi(
            vals["operating.m"],
            vals["operating.cos_phi"],
            vals["operating.i_peak"],
            v_dc=vals["operating.v_dc"],
            f_e=vals["operating.f_e"],
            f_sw=vals["operating.f_sw"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc), "operating") from None
    _check(op.ratio >= MIN_RATIO, "operating.f_sw", f"f_sw/f_e = {op.ratio:g} below the carrier PWM minimum of {MIN_RATIO}")
    _check(op.v_dc / 2 <= device.v_ds_max, "operating.v_dc", "half the DC link exceeds the device voltage rating")
    dt = vals["simulator.dead_time"]
    if dt > 0:
        step = 1.0 / (op.f_sw * vals["simulator.steps_per_carrier"])
        _check(step <= dt, "simulator.dead_time", f"shorter than one simulation step ({step:.4g} s)")
        _check(dt < 0.25 / op.f_sw, "simulator.dead_time", "must be well below a carrier period")

    e_on = _curve(vals, "on", base_dir, vals["energy.on_a"], vals["energy.on_b"])
    e_off = _curve(vals, "off", base_dir, vals["energy.off_a"], vals["energy.off_b"])
    return RunConfig(vals, base_dir, device, e_on, e_off, op)


def load_config(path=None, overrides: Mapping[str, Any] = ()) -> RunConfig:
    """Read a config file (optional), apply overrides, validate."""
    values: dict[str, Any] = {}
    base = Path(".")
    if path is not None:
        path = Path(path)
        data = _flatten(load_toml(path))
        for k in data:
            if k not in SCHEMA:
                raise ConfigError(f"unknown key in {path}", k)
        values.update(data)
        base = path.parent
    values.update(dict(overrides))
    return build_config(values, base)
