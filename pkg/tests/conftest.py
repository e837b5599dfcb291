import re

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from diracbc import make_grid, sample_potential

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def gauss_p(x):
    return 0.5 * np.exp(-20.0 * (x - 0.4) ** 2)


def sine_q(x):
    return 0.3 * np.sin(2.0 * np.pi * x)


def gaussian_case(N, T=1.0):
    return sample_potential(make_grid(T, N), gauss_p, sine_q)


@pytest.fixture
def report():
    """Collects one summary line per acceptance criterion."""

    def add(line):
        ACCEPTANCE_LINES.append(line)

    return add


def _criterion_key(line):
    # "ACCEPTANCE 1b: ..." sorts as (1, "b")
    m = re.match(r"ACCEPTANCE (\d+)(\w*):", line)
    return (int(m.group(1)), m.group(2)) if m else (10**9, line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=_criterion_key):
            terminalreporter.write_line(line)
