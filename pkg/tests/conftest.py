import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from selpref import fixtures  # noqa: E402
from selpref.bbn import EXAMPLE_PARAMS, build_network  # noqa: E402
from selpref.corpus import parse_observations  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def drink():
    return fixtures.drink_taxonomy()


@pytest.fixture
def eat():
    return fixtures.eat_taxonomy()


@pytest.fixture
def eat_store():
    return parse_observations(fixtures.EAT_OBSERVATIONS)


@pytest.fixture
def drink_net(drink):
    return build_network(drink, EXAMPLE_PARAMS)


@pytest.fixture
def eat_net(eat):
    return build_network(eat, EXAMPLE_PARAMS)


EAT_EVIDENCE = {"meat": True, "apple": True, "bagel": True, "cheese": True}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
