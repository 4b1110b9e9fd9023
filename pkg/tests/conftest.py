import pytest

from goldbach_lab.prime_engine import PrimeEngine

_ACCEPTANCE_LINES = []


def pytest_addoption(parser):
    parser.addoption(
        "--extended", action="store_true", default=False, help="run extended-scale checks"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--extended"):
        return
    skip = pytest.mark.skip(reason="extended-scale; pass --extended")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def engine():
    return PrimeEngine()


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
