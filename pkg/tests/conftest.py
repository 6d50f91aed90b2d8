import numpy as np
import pytest

from simulbell.spin_ops import generic_direction, random_direction

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, text): acceptance criterion checked by this test")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    info = _criteria_by_node.get(report.nodeid)
    if info is None:
        return
    num, text = info
    prev = _criteria.get(num, (text, True))
    _criteria[num] = (text, prev[1] and report.passed)


_criteria_by_node = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _criteria_by_node[item.nodeid] = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        text, ok = _criteria[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {text}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def random_dirs(rng):
    return lambda k: [random_direction(rng) for _ in range(k)]


@pytest.fixture
def generic_dirs(rng):
    return lambda k: [generic_direction(rng) for _ in range(k)]
