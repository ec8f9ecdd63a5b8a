import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from accelcal import AxisAngles, CalibrationParams  # noqa: E402
from accelcal.params import REFERENCE_ANGLES  # noqa: E402

HALF_PI = math.pi / 2

ACCEPTANCE_LINES = []


def random_angles(rng, tol=0.02):
    lo, hi = HALF_PI * (1 - tol), HALF_PI * (1 + tol)
    return AxisAngles(*rng.uniform(lo, hi, 3))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def truth_params():
    return CalibrationParams((0.1, -0.2, 0.05), (1.01, 0.99, 1.02), REFERENCE_ANGLES)


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
