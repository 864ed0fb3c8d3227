import sys
from functools import lru_cache
from pathlib import Path

import pytest

from anpcloss import DEFAULT_DEVICE, DEFAULT_E_OFF, DEFAULT_E_ON, STUDY_CASE, Strategy, leg_report
from anpcloss.oracle import SimConfig, simulate_leg

sys.path.insert(0, str(Path(__file__).parent))

REPO = Path(__file__).resolve().parents[1]
STUDY_CONF = REPO / "configs" / "paper-study-case.conf"

_VERDICTS: list[str] = []


@lru_cache(maxsize=None)
def study_trace(strategy: Strategy, steps: int = 256, dead_time: float = 0.0):
    return simulate_leg(SimConfig(STUDY_CASE, Strategy(strategy), dead_time=dead_time, steps_per_carrier_period=steps))


@lru_cache(maxsize=None)
def study_report(strategy: Strategy):
    return leg_report(Strategy(strategy), STUDY_CASE, DEFAULT_DEVICE, DEFAULT_E_ON, DEFAULT_E_OFF)


@pytest.fixture
def verdict():
    """Record one acceptance line; it is printed in the terminal summary."""

    def record(number: int, ok: bool, text: str):
        _VERDICTS.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {text}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in _VERDICTS:
        terminalreporter.write_line(line)
