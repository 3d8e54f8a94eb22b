import functools

import pytest

from prolate.pswf import build_basis


@functools.lru_cache(maxsize=None)
def basis(c, n_max, mu_route="moment"):
    return build_basis(float(c), int(n_max), mu_route=mu_route)


@pytest.fixture(scope="session")
def get_basis():
    return basis


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
