from datetime import datetime, timedelta, timezone

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")

T0 = datetime(2021, 3, 1, tzinfo=timezone.utc)  # a Monday


def records_every(values, interval=300, start=T0):
    from rollcast.series import RawRecord
    step = timedelta(seconds=interval)
    return [RawRecord(start + i * step, v) for i, v in enumerate(values)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# One pass/fail line per acceptance criterion, printed after the run.
_ACCEPTANCE: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_ACCEPTANCE.items()):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")
