import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from bihenon.params import ProblemParams
from bihenon.shooting import ShootingConfig, continue_singular, integrate

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def shoot(n, a, p, b, alpha=1.0, r_max=10.0):
    return integrate(ShootingConfig(alpha=alpha, b=b, r_max=r_max), ProblemParams(n, a, p))


@pytest.fixture(scope="session")
def shot_10_0_4():
    return shoot(10, 0, 4, -1.0)


@pytest.fixture(scope="session")
def shot_13_0_3():
    return shoot(13, 0, 3, -0.5)


@pytest.fixture(scope="session")
def shot_6_0_5():
    return shoot(6, 0, 5, -0.5)


@pytest.fixture(scope="session")
def singular_10_0_4():
    return continue_singular(ProblemParams(10, 0, 4), r_start=0.1, r_max=10.0)


@pytest.fixture(scope="session")
def log_radii():
    return np.geomspace(0.1, 5.0, 30)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.LINES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(module.LINES):
        terminalreporter.write_line(module.LINES[number])
    for line in module.INFO:
        terminalreporter.write_line("info: " + line)
