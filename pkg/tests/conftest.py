import warnings

import pytest

from rho_hankel.padic import NonStabilization


@pytest.fixture(autouse=True)
def _quiet_nonstabilization():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonStabilization)
        yield


# one line per acceptance criterion, collected by tests/test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
