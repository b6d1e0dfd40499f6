from pathlib import Path

import numpy as np
import pytest

from coupled_ch.grid import PeriodicGrid
from coupled_ch.selftest import random_band_limited

FIXTURES = Path(__file__).parent / "fixtures"

# filled by test_acceptance.py, echoed at the end of the run
ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def grid256():
    return PeriodicGrid(256)


@pytest.fixture
def band_limited(rng):
    def make(grid, kmax, amplitude=1.0):
        return random_band_limited(grid, kmax, rng, amplitude)

    return make



def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
