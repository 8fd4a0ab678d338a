import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from spinreversal.ising import IsingModel, random_ising

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_model():
    # ground state (-1, 1, 1) at -4.25, checked by hand
    return IsingModel(3, {0: 1.0, 1: -0.5}, {(0, 1): 2.0, (1, 2): -1.0}, 0.25)


@pytest.fixture
def model8():
    return random_ising(8, np.random.default_rng(8), density=0.6)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Record one summary line per acceptance criterion; printed at the end of the session."""

    def record(number: int, passed: bool, detail: str):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
