import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tsvolterra.timescale import Interval, Point, TimeScale  # noqa: E402
from tsvolterra.volterra import VolterraProblem  # noqa: E402


@pytest.fixture
def unit():
    return TimeScale.interval(0, 1)


@pytest.fixture
def z5():
    return TimeScale.integers(0, 5)


@pytest.fixture
def mixed():
    """[0,1] together with the isolated points 2 and 3."""
    return TimeScale([Interval(0.0, 1.0), Point(2.0), Point(3.0)])


@pytest.fixture(scope="session")
def continuum_problem():
    return VolterraProblem(TimeScale.interval(0, 1), "1", "5", h_max=1e-3)


@pytest.fixture(scope="session")
def discrete_problem():
    return VolterraProblem(TimeScale.integers(0, 5), "1", "5")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
