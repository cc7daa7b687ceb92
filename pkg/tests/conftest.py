import math

import numpy as np
import pytest

from lyapspec import maps
from lyapspec.pressure import pressure_curve

GOLDEN = (math.sqrt(5) - 1) / 2
GAUSS_EXPONENT = math.pi ** 2 / (6 * math.log(2))


def dyadic_closed_form(t):
    return math.log(2.0 ** -t / (1.0 - 2.0 ** -t))


@pytest.fixture(scope="session")
def gauss_curve():
    return pressure_curve(maps.gauss(), 0.6, 3.0, steps=50)


@pytest.fixture(scope="session")
def dyadic_curve():
    return pressure_curve(maps.dyadic_luroth(), 0.1, 5.0, steps=50)


@pytest.fixture(scope="session")
def renyi_curve():
    return pressure_curve(maps.renyi(), 0.6, 2.0, steps=30)


@pytest.fixture(scope="session")
def logdir_curves():
    return {m: pressure_curve(maps.map_from_record(f"luroth-logdir-{m}"), 0.55, 3.0, steps=40) for m in (1, 5)}


@pytest.fixture(scope="session")
def mp_curve():
    return pressure_curve(maps.map_from_record("mp"), 0.55, 2.5, steps=30)


@pytest.fixture(scope="session")
def three_branch():
    return maps.luroth(maps.finite_sequence([0.5, 0.25, 0.25]), "three")


@pytest.fixture(scope="session")
def three_branch_curve(three_branch):
    return pressure_curve(three_branch, -3.0, 4.0, steps=60)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
