import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from specdecay import SpectralProfile, generate, make_grid

settings.register_profile(
    "default", deadline=None, max_examples=30,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("default")


@pytest.fixture
def grid8():
    return make_grid(8, 2 * math.pi)


@pytest.fixture
def grid16():
    return make_grid(16, 2 * math.pi)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_solenoidal(grid, seed=0, sigma=0.0, amplitude=1.0):
    prof = SpectralProfile(sigma, amplitude, (2 / 3) * grid.xi_max_axis, seed=seed)
    return generate(prof, grid)


# Acceptance verdicts, printed as one line per criterion at the end of the session.
VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
