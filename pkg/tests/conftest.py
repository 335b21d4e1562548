import numpy as np
import pytest

from rtq.bogoliubov import random_symplectic_series
from rtq.gaussian_core import ModePartition, SqueezeSpec, make_state, thermal_state

# (criterion, passed, detail) lines collected by the acceptance suite
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  criterion {label}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def series3():
    return random_symplectic_series(5, 3, h=1e-3)


@pytest.fixture
def split12():
    return ModePartition.from_system([1, 2], 3)


@pytest.fixture
def thermal3():
    return thermal_state(3, 0.4)


@pytest.fixture
def tms_vacuum3():
    return make_state(3, 0.0, SqueezeSpec("two_mode", 0.5, 0.0, (1, 2)))
