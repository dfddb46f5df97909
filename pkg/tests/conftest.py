import numpy as np
import pytest

from molcomm.arrival import from_table, make_geometric

ACCEPTANCE_RESULTS = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def geom8():
    return make_geometric(0.5, 8)


@pytest.fixture
def instant():
    return from_table([1.0])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}")
