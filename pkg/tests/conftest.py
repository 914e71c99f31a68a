import sys

import pytest
from hypothesis import HealthCheck, settings

from salem.fields import fixture

settings.register_profile("salem", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("salem")


@pytest.fixture(scope="session")
def gaussian():
    return fixture("gaussian")


@pytest.fixture(scope="session")
def cbrt2():
    return fixture("cbrt2")


@pytest.fixture(scope="session", params=["gaussian", "zeta8", "cbrt2", "sqrt2"])
def any_field(request):
    return fixture(request.param)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    verdicts = getattr(mod, "VERDICTS", None)
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(verdicts):
        terminalreporter.write_line(verdicts[k])
