import math

import numpy as np
import pytest

from anpcloss.device import DEFAULT_DEVICE, DEFAULT_E_OFF, DEFAULT_E_ON
from anpcloss.modulation import DEVICES, Strategy, commutation_events, count_by_device
from anpcloss.operating import STUDY_CASE, OperatingPoint
from anpcloss.oracle import (
    TOPOLOGY,
    PathViolation,
    RailShort,
    SimConfig,
    compare_reports,
    conduction_paths,
    rail_short_check,
    simulate_leg,
    simulated_losses,
    trace_rms,
)
from anpcloss.report import DeviceLoss, LossReport
from conftest import study_report, study_trace

ALL = list(Strategy)


def test_topology_paths():
    paths = TOPOLOGY.paths()
    assert len(paths) == 4
    devs = sorted(tuple(sorted(DEVICES[j] for j, _ in p[1])) for p in paths)
    assert devs == [("S1", "S2"), ("S2", "S5"), ("S3", "S4"), ("S3", "S6")]


@pytest.mark.parametrize(
    "gates, short",
    [
        ((1, 1, 0, 0, 1, 0), True),
        ((1, 1, 0, 0, 0, 1), False),
        ((0,) * 6, False),
        ((0, 0, 1, 1, 0, 1), True),
        ((1, 1, 1, 1, 0, 0), True),
        ((0, 1, 1, 0, 1, 1), False),
    ],
)
def test_rail_short_check(gates, short):
    assert rail_short_check(gates) is short


def test_fpcm_zero_state_splits_current():
    res = conduction_paths((0, 1, 1, 0, 1, 1), +1)
    assert res.level == "0"
    assert res.coeff[1] == pytest.approx(0.5)   # S2 forward
    assert res.coeff[4] == pytest.approx(-0.5)  # S5 reverse
    assert res.coeff[5] == pytest.approx(0.5)   # S6 forward
    assert res.coeff[2] == pytest.approx(-0.5)  # S3 reverse
    assert sum(res.coeff[j] for j in (1, 2)) == pytest.approx(0.0)


def test_dnpc_zero_state_uses_reverse_clamp():
    res = conduction_paths((0, 1, 1, 0, 0, 0), +1)
    assert res.level == "0"
    assert res.coeff[1] == 1.0 and res.coeff[4] == -1.0
    # negative load current: S3 forward and S6 reverse, per ampere of (negative) load current
    res = conduction_paths((0, 1, 1, 0, 0, 0), -1)
    assert res.coeff[2] == -1.0 and res.coeff[5] == 1.0
    assert res.flows == {("S3", "F"): 1.0, ("S6", "R"): 1.0}


def test_p_state_single_path():
    res = conduction_paths((1, 1, 0, 0, 0, 0), +1)
    assert res.level == "P"
    assert tuple(res.coeff) == (1.0, 1.0, 0.0, 0.0, 0.0, 0.0)


def test_conduction_paths_errors():
    with pytest.raises(RailShort):
        conduction_paths((1, 1, 0, 0, 1, 0), +1)
    # only S1 gated: positive current cannot pass the open S2 forward, so it freewheels low
    res = conduction_paths((1, 0, 0, 0, 0, 0), +1)
    assert res.level == "N"
    assert res.flows == {("S3", "R"): 1.0, ("S4", "R"): 1.0}


def test_every_safe_gate_state_has_a_path():
    # third-quadrant conduction always offers a freewheeling route
    for code in range(64):
        bits = tuple(code >> j & 1 for j in range(6))
        if rail_short_check(bits):
            continue
        for sign in (1, -1):
            try:
                conduction_paths(bits, sign)
            except PathViolation:
                pytest.fail(f"no path for {bits} sign {sign}")
    assert conduction_paths((1, 1, 0, 0, 0, 0), 0).rail is None


def test_all_off_freewheels_through_reverse_channels():
    assert conduction_paths((0,) * 6, +1).level == "N"
    assert conduction_paths((0,) * 6, -1).level == "P"


def test_sim_config_validation():
    with pytest.raises(ValueError):
        SimConfig(STUDY_CASE, Strategy.DNPC, steps_per_carrier_period=32)
    with pytest.raises(ValueError):
        SimConfig(STUDY_CASE, Strategy.DNPC, dead_time=-1e-9)
    assert SimConfig(STUDY_CASE, Strategy.DNPC).step == pytest.approx(78.125e-9)


@pytest.mark.parametrize("strategy", ALL)
def test_current_conservation(strategy):
    tr = study_trace(strategy)
    # into OUT: S2 forward and -S3 (S3 drains from OUT)
    into_out = tr.i_dev[:, 1] - tr.i_dev[:, 2]
    assert np.max(np.abs(into_out - tr.i_load)) <= 1e-12


def test_dnpc_s5_never_forward():
    tr = study_trace(Strategy.DNPC)
    assert np.all(tr.i_dev[:, 4] <= 0)
    assert trace_rms(tr, "S5", "forward") == 0.0


def test_sscm_and_oscm_share_levels_not_currents():
    a, b = study_trace(Strategy.ANPC_SSCM), study_trace(Strategy.ANPC_OSCM)
    assert np.array_equal(a.level, b.level)
    assert not np.allclose(a.i_dev, b.i_dev)


def test_zero_current_trace_and_report():
    op = OperatingPoint.from_cos_phi(0.7, 0.9, 0.0)
    tr = simulate_leg(SimConfig(op, Strategy.ANPC_FPCM, steps_per_carrier_period=64))
    assert not tr.i_dev.any()
    assert all(trace_rms(tr, d) == 0.0 for d in DEVICES)
    rep = simulated_losses(tr, DEFAULT_DEVICE, DEFAULT_E_ON, DEFAULT_E_OFF)
    assert rep.leg_total == 0.0


def test_trace_rms_anchor():
    op = OperatingPoint(1.0, 0.0, 1.0)
    tr = simulate_leg(SimConfig(op, Strategy.DNPC, steps_per_carrier_period=128))
    assert trace_rms(tr, "S1", "F") == pytest.approx(math.sqrt(2 / (3 * math.pi)), rel=0.005)
    with pytest.raises(ValueError):
        trace_rms(tr, "S1", "up")


@pytest.mark.parametrize("strategy", ALL)
def test_trace_step_convergence(strategy):
    a, b = study_trace(strategy, 256), study_trace(strategy, 512)
    for d in DEVICES:
        for direction in (None, "F", "R"):
            ra, rb = trace_rms(a, d, direction), trace_rms(b, d, direction)
            if ra > 0:
                assert abs(rb - ra) / ra < 1e-3, (d, direction)


@pytest.mark.parametrize("strategy", ALL)
def test_trace_symmetry(strategy):
    tr = study_trace(strategy)
    for a, b in (("S1", "S4"), ("S2", "S3"), ("S5", "S6")):
        for direction in (None, "F", "R"):
            ra, rb = trace_rms(tr, a, direction), trace_rms(tr, b, direction)
            assert rb == pytest.approx(ra, rel=0.005, abs=1e-12)


@pytest.mark.parametrize("strategy", ALL)
def test_dead_time_run_is_safe_and_close(strategy):
    base = study_trace(strategy)
    dt = study_trace(strategy, 256, 100e-9)
    assert not (dt.gates & ~base.gates).any()
    for d in DEVICES:
        ra, rd = trace_rms(base, d), trace_rms(dt, d)
        assert abs(rd - ra) / ra < 0.01, d


@pytest.mark.parametrize("strategy", ALL)
def test_event_counts_match_modulation(strategy):
    tr = study_trace(strategy)
    ev = commutation_events(strategy, STUDY_CASE, steps_per_carrier=256)
    assert count_by_device(tr.events) == count_by_device(ev)
    assert [e.theta for e in tr.events] == [e.theta for e in ev]


def test_hard_flags_follow_forward_current():
    tr = study_trace(Strategy.DNPC)
    for e in tr.events:
        if e.device in ("S5", "S6"):
            pytest.fail("DNPC clamps must not switch")
    hard = [e for e in tr.events if e.hard]
    assert hard and all(e.i_ds > 0 for e in hard)


@pytest.mark.parametrize("strategy", ALL)
def test_simulated_matches_analytic(strategy):
    sim = simulated_losses(study_trace(strategy), DEFAULT_DEVICE, DEFAULT_E_ON, DEFAULT_E_OFF)
    c = compare_reports(study_report(strategy), sim)
    assert c.passed
    assert c.leg_error < 0.03
    for d in DEVICES:
        assert c.device_errors[d] < 0.03, d


def test_fpcm_clamp_split_quarter_power():
    fp = study_trace(Strategy.ANPC_FPCM)
    ss = study_trace(Strategy.ANPC_SSCM)
    # positive half zero state with positive current: SSCM S5 carries I, FPCM S5 I/2
    zero = (fp.level == "0") & (ss.level == "0") & (fp.i_load > 0) & (fp.theta < math.pi)
    assert zero.sum() > 1000
    ratio = np.sum(fp.i_dev[zero, 4] ** 2) / np.sum(ss.i_dev[zero, 4] ** 2)
    assert ratio == pytest.approx(0.25, rel=1e-12)


def test_reverse_drop_extension_adds_loss():
    cfg = SimConfig(STUDY_CASE, Strategy.DNPC, include_reverse_conduction_drop=True)
    base = simulated_losses(study_trace(Strategy.DNPC), DEFAULT_DEVICE, DEFAULT_E_ON, DEFAULT_E_OFF)
    ext = simulated_losses(simulate_leg(cfg), DEFAULT_DEVICE, DEFAULT_E_ON, DEFAULT_E_OFF)
    # DNPC clamps conduct with the channel off; S1..S4 reverse current always flows with the gate on
    assert ext.devices["S5"].p_cond > base.devices["S5"].p_cond
    assert ext.devices["S1"].p_cond == pytest.approx(base.devices["S1"].p_cond)


def test_compare_reports_identity_and_threshold():
    rep = study_report(Strategy.ANPC_OSCM)
    c = compare_reports(rep, rep)
    assert c.leg_error == 0.0 and all(v == 0.0 for v in c.device_errors.values())
    sim = simulated_losses(study_trace(Strategy.ANPC_OSCM), DEFAULT_DEVICE, DEFAULT_E_ON, DEFAULT_E_OFF)
    assert not compare_reports(rep, sim, threshold=1e-6).passed


def test_compare_reports_mismatch():
    with pytest.raises(ValueError):
        compare_reports(study_report(Strategy.DNPC), study_report(Strategy.ANPC_FPCM))
    other = OperatingPoint.from_cos_phi(0.5, 0.9, 3.0)
    rep = study_report(Strategy.DNPC)
    moved = LossReport(rep.strategy, rep.devices, op=other)
    with pytest.raises(ValueError):
        compare_reports(rep, moved)
    with pytest.raises(ValueError):
        compare_reports(rep, rep, threshold=-1)


def test_compare_zero_reference():
    zero = {d: DeviceLoss(0.0, 0.0, 0.0, 0.0) for d in DEVICES}
    a = LossReport(Strategy.DNPC, zero)
    assert compare_reports(a, a).leg_error == 0.0


def test_trace_sum_sq_non_negative():
    tr = study_trace(Strategy.ANPC_SSCM)
    assert all(v >= 0 for v in tr.sum_sq.values())
    assert tr.n_steps == 256_000


@pytest.mark.parametrize("strategy", ALL)
def test_rms_sweep_over_m(strategy):
    from anpcloss.analytic import leg_report

    for m in (0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0):
        op = OperatingPoint.from_cos_phi(m, 0.9, 3.0)
        rep = leg_report(strategy, op, DEFAULT_DEVICE, DEFAULT_E_ON, DEFAULT_E_OFF)
        tr = simulate_leg(SimConfig(op, strategy, steps_per_carrier_period=64))
        for d in DEVICES:
            for direction, ref in (("F", rep.devices[d].rms_fwd), ("R", rep.devices[d].rms_rev)):
                assert trace_rms(tr, d, direction) == pytest.approx(ref, rel=0.02, abs=1e-12), (m, d, direction)
