import datetime as dt
import random

import pytest

from vcred.experiments import World
from vcred.group import setup

TODAY = dt.date(2024, 6, 1)

_criterion_lines = []


@pytest.fixture(scope="session")
def toy():
    return setup("toy", "mock")


@pytest.fixture(scope="session")
def mock1009():
    return setup("toy", "mock", q=1009)


@pytest.fixture(scope="session")
def mock():
    return setup("standard", "mock")


@pytest.fixture(scope="session")
def curve():
    return setup("standard", "curve")


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture
def world(mock):
    return World(mock, seed=11)


@pytest.fixture
def record():
    """Collect one summary line per acceptance criterion."""
    return _criterion_lines.append


def pytest_terminal_summary(terminalreporter):
    if _criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in _criterion_lines:
            terminalreporter.write_line(line)
