"""Conduction and switching losses of a GaN three-level ANPC inverter leg.

Four carrier PWM strategies are modelled (DNPC, ANPC_SSCM, ANPC_OSCM,
ANPC_FPCM). ``analytic`` gives the averaged loss model, ``oracle`` a
time-stepped switching simulator used to check it.
"""

from .analytic import (
    leg_report,
    rms_closed_form,
    rms_quadrature,
    duty_profile,
    switching_loss_continuous,
    switching_loss_discrete,
    three_phase_report,
)
from .config import ConfigError, RunConfig, load_config
from .device import (
    DEFAULT_DEVICE,
    DEFAULT_E_OFF,
    DEFAULT_E_ON,
    DeviceParams,
    EnergyCurve,
    EnergySample,
    energy_at,
    fit_power_law,
)
from .modulation import DEVICES, ReferenceKind, Strategy, commutation_events, gate_vector, truth_table
from .operating import STUDY_CASE, OperatingPoint, load_current
from .oracle import SimConfig, SimulationAbort, compare_reports, simulate_leg, simulated_losses, trace_rms
from .report import DeviceLoss, LossReport, format_report_csv, parse_report_csv

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DEFAULT_DEVICE",
    "DEFAULT_E_OFF",
    "DEFAULT_E_ON",
    "DEVICES",
    "DeviceLoss",
    "DeviceParams",
    "EnergyCurve",
    "EnergySample",
    "LossReport",
    "OperatingPoint",
    "ReferenceKind",
    "RunConfig",
    "STUDY_CASE",
    "SimConfig",
    "SimulationAbort",
    "Strategy",
    "commutation_events",
    "compare_reports",
    "duty_profile",
    "energy_at",
    "fit_power_law",
    "format_report_csv",
    "gate_vector",
    "leg_report",
    "load_config",
    "load_current",
    "parse_report_csv",
    "rms_closed_form",
    "rms_quadrature",
    "simulate_leg",
    "simulated_losses",
    "switching_loss_continuous",
    "switching_loss_discrete",
    "three_phase_report",
    "trace_rms",
    "truth_table",
]
