"""``anpc-loss`` command line.

Exit codes: 0 ok, 1 invalid input, 2 tolerance failure, 3 simulator abort.
Data files are CSV with full float precision; console tables round to four
significant digits. Files are written only after all computation succeeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .analytic import leg_report
from .config import SCHEMA, ConfigError, RunConfig, load_config
from .device import fit_power_law, read_samples_csv, write_curve_file
from .modulation import DEVICES, Strategy, pattern_table
from .operating import OperatingPoint
from .oracle import SimConfig, SimulationAbort, compare_reports, simulate_leg, simulated_losses, trace_rms
from .report import LossReport, format_report_csv

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_TOLERANCE = 2
EXIT_ABORT = 3

COMPARE_HEADER = ("strategy", "analytic_total_w", "simulated_total_w", "rel_error", "pass")
SWEEP_KEYS = ("m", "cos_phi", "i_peak")
SWEEP_VALUES = ("rms_fwd_a", "rms_rev_a", "p_cond_w", "p_sw_w", "p_total_w")
SWEEP_SIM = ("sim_rms_fwd_a", "sim_rms_rev_a")
WAVEFORM_HEADER = ("theta_rad", "i_load_a") + tuple(f"i_{d.lower()}_a" for d in DEVICES) + ("level",)
PATTERN_HEADER = ("theta_rad", "v_ref", "v_tri1", "v_tri2") + tuple(d.lower() for d in DEVICES)


# --- output helpers -------------------------------------------------------

def _csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(x) for x in row])
    return buf.getvalue()


def _cell(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x) + 0.0)  # no "-0.0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


def _sig4(x) -> str:
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.4g}"
    return _cell(x)


def console_table(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    rows = [list(r) for r in rows]
    cells = [list(header)] + [[_sig4(x) for x in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    # numbers right-aligned, text left-aligned, header follows its column
    numeric = [bool(rows) and all(isinstance(r[i], (int, float, np.number)) and not isinstance(r[i], bool) for r in rows)
               for i in range(len(header))]
    lines = []
    for n, r in enumerate(cells):
        lines.append("  ".join(c.rjust(w) if num else c.ljust(w) for c, w, num in zip(r, widths, numeric)).rstrip())
        if n == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _write_all(out_dir: Path, files: dict[str, str]) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out_dir / name).write_text(text)


def parse_compare_csv(text: str) -> list[dict]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != COMPARE_HEADER:
        raise ValueError(f"unexpected compare header {header!r}")
    rows = []
    for row in reader:
        if not row:
            continue
        if row[4] not in ("true", "false"):
            raise ValueError(f"line {reader.line_num}: pass must be true/false")
        rows.append(
            {
                "strategy": Strategy.parse(row[0]),
                "analytic_total_w": float(row[1]),
                "simulated_total_w": float(row[2]),
                "rel_error": float(row[3]),
                "pass": row[4] == "true",
            }
        )
    return rows


def _report_rows(reports: Iterable[LossReport]):
    for rep in reports:
        for d in DEVICES:
            x = rep.devices[d]
            yield (rep.strategy.value, d, x.rms_fwd, x.rms_rev, x.p_cond, x.p_sw, x.p_total)


def _print_reports(reports: Sequence[LossReport], title: str) -> None:
    print(title)
    print(console_table(("strategy", "device", "rms_fwd_a", "rms_rev_a", "p_cond_w", "p_sw_w", "p_total_w"), _report_rows(reports)))
    print()
    print(console_table(("strategy", "p_cond_w", "p_sw_w", "leg_total_w"),
                        [(r.strategy.value, r.conduction_total, r.switching_total, r.leg_total) for r in reports]))


# --- computations ---------------------------------------------------------

def _sim_config(cfg: RunConfig, strategy: Strategy, op: OperatingPoint | None = None) -> SimConfig:
    return SimConfig(
        op=op or cfg.op,
        strategy=strategy,
        kind=cfg.reference,
        dead_time=cfg["simulator.dead_time"],
        steps_per_carrier_period=cfg["simulator.steps_per_carrier"],
        include_reverse_conduction_drop=cfg["simulator.reverse_drop"],
        reverse_drop_v=cfg["simulator.reverse_drop_v"],
        load_r=cfg["operating.load_r"],
        load_l=cfg["operating.load_l"],
    )


def analytic_reports(cfg: RunConfig) -> list[LossReport]:
    return [leg_report(s, cfg.op, cfg.device, cfg.e_on, cfg.e_off, cfg.reference) for s in cfg.strategies]


def run_analyze(cfg: RunConfig) -> int:
    reports = analytic_reports(cfg)
    _write_all(cfg.out_dir, {"analyze.csv": format_report_csv(reports)})
    _print_reports(reports, "analytic losses")
    return EXIT_OK


def run_compare(cfg: RunConfig) -> int:
    analytic, simulated, rows = [], [], []
    for s in cfg.strategies:
        a = leg_report(s, cfg.op, cfg.device, cfg.e_on, cfg.e_off, cfg.reference)
        trace = simulate_leg(_sim_config(cfg, s))
        sim = simulated_losses(trace, cfg.device, cfg.e_on, cfg.e_off)
        c = compare_reports(a, sim, cfg.threshold)
        analytic.append(a)
        simulated.append(sim)
        rows.append((s.value, c.analytic_total, c.simulated_total, c.leg_error, c.passed))
    _write_all(
        cfg.out_dir,
        {
            "analytic.csv": format_report_csv(analytic),
            "simulated.csv": format_report_csv(simulated),
            "compare.csv": _csv_text(COMPARE_HEADER, rows),
        },
    )
    print(f"analytic vs simulated leg totals (threshold {cfg.threshold:.4g})")
    print(console_table(COMPARE_HEADER, rows))
    return EXIT_OK if all(r[4] for r in rows) else EXIT_TOLERANCE


def sweep_rows(cfg: RunConfig):
    simulate = cfg["sweep.simulate"]
    for m in cfg["sweep.m"]:
        for cos_phi in cfg["sweep.cos_phi"]:
            for i_peak in cfg["sweep.i_peak"]:
                op = OperatingPoint.from_cos_phi(m, cos_phi, i_peak, v_dc=cfg.op.v_dc, f_e=cfg.op.f_e, f_sw=cfg.op.f_sw)
                for s in cfg.strategies:
                    rep = leg_report(s, op, cfg.device, cfg.e_on, cfg.e_off, cfg.reference)
                    trace = simulate_leg(_sim_config(cfg, s, op)) if simulate else None
                    for d in DEVICES:
                        x = rep.devices[d]
                        row = [m, cos_phi, i_peak, s.value, d, x.rms_fwd, x.rms_rev, x.p_cond, x.p_sw, x.p_total]
                        if trace is not None:
                            row += [trace_rms(trace, d, "F"), trace_rms(trace, d, "R")]
                        yield row


def sweep_header(simulate: bool) -> tuple[str, ...]:
    return SWEEP_KEYS + ("strategy", "device") + SWEEP_VALUES + (SWEEP_SIM if simulate else ())


def run_sweep(cfg: RunConfig) -> int:
    header = sweep_header(cfg["sweep.simulate"])
    rows = list(sweep_rows(cfg))
    _write_all(cfg.out_dir, {"sweep.csv": _csv_text(header, rows)})
    n_points = len(cfg["sweep.m"]) * len(cfg["sweep.cos_phi"]) * len(cfg["sweep.i_peak"])
    print(f"{n_points} grid points x {len(cfg.strategies)} strategies -> {cfg.out_dir / 'sweep.csv'}")
    totals = {}
    for r in rows:
        key = (r[0], r[1], r[2], r[3])
        totals[key] = totals.get(key, 0.0) + r[9]
    print(console_table(SWEEP_KEYS + ("strategy", "leg_total_w"), [k + (v,) for k, v in totals.items()]))
    return EXIT_OK


def waveform_csv(trace, decimate: int = 1) -> str:
    sl = slice(None, None, decimate)
    cols = [trace.theta[sl], trace.i_load[sl]] + [trace.i_dev[sl, j] for j in range(6)]
    rows = (tuple(float(c[k]) for c in cols) + (str(trace.level[sl][k]),) for k in range(len(cols[0])))
    return _csv_text(WAVEFORM_HEADER, rows)


def run_simulate(cfg: RunConfig, waveform: bool = False, decimate: int = 1) -> int:
    reports, files = [], {}
    for s in cfg.strategies:
        trace = simulate_leg(_sim_config(cfg, s))
        reports.append(simulated_losses(trace, cfg.device, cfg.e_on, cfg.e_off))
        if waveform:
            files[f"waveform_{s.value}.csv"] = waveform_csv(trace, decimate)
    files["simulated.csv"] = format_report_csv(reports)
    _write_all(cfg.out_dir, files)
    _print_reports(reports, "simulated losses")
    return EXIT_OK


def patterns_csv(cfg: RunConfig, strategy: Strategy) -> str:
    theta, v_ref, tri1, tri2, gates = pattern_table(
        strategy, cfg.op.m, cfg.op.ratio, cfg["patterns.steps_per_period"], cfg.reference
    )
    rows = (
        (float(theta[k]), float(v_ref[k]), float(tri1[k]), float(tri2[k]), *(int(g) for g in gates[k]))
        for k in range(len(theta))
    )
    return _csv_text(PATTERN_HEADER, rows)


def run_patterns(cfg: RunConfig, strategies: Sequence[Strategy]) -> int:
    files = {f"patterns_{s.value}.csv": patterns_csv(cfg, s) for s in strategies}
    _write_all(cfg.out_dir, files)
    for name in files:
        print(cfg.out_dir / name)
    return EXIT_OK


def run_fit_energy(samples_path: Path, out_path: Path) -> int:
    fit = fit_power_law(read_samples_csv(samples_path))
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_curve_file(out_path, fit.curve, fit.residuals)
    print(f"a = {fit.curve.coeff_a!r} J/A^b")
    print(f"b = {fit.curve.exponent_b!r}")
    print(f"rms log residual = {fit.rms_log_residual:.4g}")
    print("log residuals: " + ", ".join(f"{r:.4g}" for r in fit.residuals))
    print(f"curve written to {out_path}")
    return EXIT_OK


# --- argument parsing -----------------------------------------------------

def _common_options(parser: argparse.ArgumentParser) -> None:
    # SUPPRESS so the same flag may appear before or after the subcommand
    parser.add_argument("--config", metavar="PATH", default=argparse.SUPPRESS, help="TOML run configuration")
    parser.add_argument("--out", metavar="DIR", default=argparse.SUPPRESS, help="output directory (output.dir)")
    parser.add_argument("--threshold", metavar="FRACTION", default=argparse.SUPPRESS, help="compare threshold (analysis.threshold)")
    parser.add_argument("--set", metavar="KEY=VALUE", action="append", default=argparse.SUPPRESS, dest="sets", help="override any config key; repeatable")
    keys = parser.add_argument_group("config keys")
    for key, entry in SCHEMA.items():
        keys.add_argument(f"--{key}", metavar="VALUE", default=argparse.SUPPRESS, dest=f"key:{key}", help=entry.help)


class _Parser(argparse.ArgumentParser):
    # argparse uses status 2 for usage errors, which is our tolerance code
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="anpc-loss", usage="%(prog)s [options] COMMAND [command options]", description="Loss model of a GaN three-level ANPC inverter leg.")
    _common_options(parser)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(name, help_text, usage="%(prog)s [options]"):
        p = sub.add_parser(name, prog=f"anpc-loss {name}", help=help_text, description=help_text, usage=usage)
        _common_options(p)
        return p

    add("analyze", "analytic per-device losses for each strategy")
    add("compare", "analytic model against the switching simulator")
    add("sweep", "analytic losses over an m x cos_phi x i_peak grid")
    p = add("simulate", "switching simulator losses, optional current waveforms")
    p.add_argument("--waveform", action="store_true", help="also write waveform_<STRATEGY>.csv")
    p.add_argument("--decimate", type=int, default=1, metavar="N", help="keep every N-th waveform sample")
    p = add("patterns", "reference, carriers and gate signals over one period")
    p.add_argument("--strategy", action="append", metavar="NAME", help="strategy (repeatable); default: analysis.strategies")
    p = add("fit-energy", "fit E = a * I**b to measured switching energies", "%(prog)s [options] SAMPLES")
    p.add_argument("samples", type=Path, help="CSV with header current_a,energy_j")
    p.add_argument("--curve-out", type=Path, metavar="PATH", help="curve file (default: <out>/energy_curve.toml)")
    return parser


def _overrides(ns: argparse.Namespace) -> dict[str, str]:
    over: dict[str, str] = {}
    for item in getattr(ns, "sets", []) or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        over[key.strip()] = value.strip()
    for name, value in vars(ns).items():
        if name.startswith("key:"):
            over[name[4:]] = value
    if hasattr(ns, "out"):
        over["output.dir"] = ns.out
    if hasattr(ns, "threshold"):
        over["analysis.threshold"] = ns.threshold
    return over


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = load_config(getattr(ns, "config", None), _overrides(ns))
        if ns.command == "analyze":
            return run_analyze(cfg)
        if ns.command == "compare":
            return run_compare(cfg)
        if ns.command == "sweep":
            return run_sweep(cfg)
        if ns.command == "simulate":
            if ns.decimate < 1:
                raise ConfigError("--decimate must be >= 1")
            return run_simulate(cfg, ns.waveform, ns.decimate)
        if ns.command == "patterns":
            strategies = tuple(Strategy.parse(s) for s in ns.strategy) if ns.strategy else cfg.strategies
            return run_patterns(cfg, strategies)
        if ns.command == "fit-energy":
            return run_fit_energy(ns.samples, ns.curve_out or cfg.out_dir / "energy_curve.toml")
    except SimulationAbort as exc:
        print(f"anpc-loss: simulator abort: {exc}", file=sys.stderr)
        return EXIT_ABORT
    except OSError as exc:
        print(f"anpc-loss: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"anpc-loss: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    parser.error(f"unknown command {ns.command!r}")  # pragma: no cover
    return EXIT_INVALID  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
