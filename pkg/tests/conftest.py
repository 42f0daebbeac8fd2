import os
import sys

import pytest

HERE = os.path.dirname(__file__)
sys.path.insert(0, HERE)

from tbisim.parser import parse_file  # noqa: E402

FIXTURES = os.path.join(HERE, "fixtures")

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE = {}


def fixture_path(name):
    return os.path.join(FIXTURES, name)


@pytest.fixture(scope="session")
def fig1():
    return {i: parse_file(fixture_path("a%d.tck" % i)) for i in range(1, 7)}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line("criterion %d: %s  %s" % (n, "PASS" if ok else "FAIL", detail))
