import warnings

import pytest
from hypothesis import settings

from alpha_envelope import disc

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")


@pytest.fixture
def unit_disc():
    return disc()


@pytest.fixture(autouse=True)
def _quiet_alpha_zero():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="alpha = 0")
        yield


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {detail}")
