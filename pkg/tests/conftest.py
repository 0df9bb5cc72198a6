import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", deadline=None, max_examples=500)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = Path(__file__).parent / "data"

_criteria: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            n, title = m.args
            _criteria.setdefault(n, {"title": title, "outcomes": []})


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _criteria[m.args[0]]["outcomes"].append((rep.passed, round(rep.duration, 2)))


def pytest_terminal_summary(terminalreporter):
    ran = {n: c for n, c in _criteria.items() if c["outcomes"]}
    if not ran:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(ran):
        c = ran[n]
        ok = all(p for p, _ in c["outcomes"])
        secs = sum(d for _, d in c["outcomes"])
        tr.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {c['title']}  ({secs:.1f} s)")
