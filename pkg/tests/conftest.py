import pathlib
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(pathlib.Path(__file__).parent))

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

from goepel import abel  # noqa: E402
from goepel.theta import validate_riemann  # noqa: E402

CANONICAL = (1j, 1j, 0.5j)
GENERIC = (0.1 + 1j, -0.2 + 1.1j, 0.15 + 0.4j)


@pytest.fixture(scope="session")
def canonical_tau():
    return validate_riemann(*CANONICAL)


@pytest.fixture(scope="session")
def generic_tau():
    return validate_riemann(*GENERIC)


@pytest.fixture(scope="session")
def generic_ctx(generic_tau):
    return abel.prepare(generic_tau)


# ---- acceptance verdict lines

_VERDICTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    n, title = mark.args
    if rep.failed or (rep.when == "call" and n not in _VERDICTS):
        _VERDICTS[n] = ("FAIL" if rep.failed else "PASS", title)


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_VERDICTS):
        verdict, title = _VERDICTS[n]
        terminalreporter.write_line(f"{verdict} criterion {n:2d}: {title}")
