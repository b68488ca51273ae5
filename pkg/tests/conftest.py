import re

import pytest

_criteria = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    if report.when == "call" or (report.when == "setup" and report.failed):
        _criteria[n] = ("PASS" if report.passed else "FAIL", report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        verdict, secs = _criteria[n]
        terminalreporter.write_line(f"criterion {n:>2}: {verdict}  ({secs:.2f}s)")


@pytest.fixture(scope="session")
def rng():
    import random

    return random.Random(20240601)
