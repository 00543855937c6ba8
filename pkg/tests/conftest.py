import numpy as np
import pytest

from hubscreen.zscore import DataMatrix

ACCEPTANCE_LINES: list[str] = []


def gaussian(n, p, seed):
    return DataMatrix(np.random.default_rng(seed).standard_normal((n, p)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
