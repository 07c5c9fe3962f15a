import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

_ACCEPTANCE: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or rep.when not in ("setup", "call"):
        return
    number, title = marker.args
    if rep.when == "setup" and rep.passed:
        return
    note = dict(item.user_properties).get("note", "")
    _ACCEPTANCE[number] = {"title": title, "passed": rep.passed, "seconds": rep.duration, "note": note}


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        r = _ACCEPTANCE[number]
        status = "PASS" if r["passed"] else "FAIL"
        line = f"[{status}] criterion {number:2d}: {r['title']} ({r['seconds']:.2f}s)"
        if r["note"]:
            line += f" | {r['note']}"
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def rel_close(a, b, rel):
    return abs(a - b) <= rel * max(abs(b), math.ulp(1.0))
