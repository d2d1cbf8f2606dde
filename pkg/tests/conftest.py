import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(id, title): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    crit, title = marker.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        state = "SKIP" if rep.skipped else ("PASS" if rep.passed else "FAIL")
        details = [v for k, v in item.user_properties if k == "detail"]
        entry = _RESULTS.setdefault(crit, {"title": title, "states": [], "details": []})
        entry["states"].append(state)
        entry["details"].extend(details)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")

    def key(c):
        return int(c[2:]) if c[2:].isdigit() else c

    for crit in sorted(_RESULTS, key=key):
        entry = _RESULTS[crit]
        states = entry["states"]
        if "FAIL" in states:
            verdict = "FAIL"
        elif all(s == "SKIP" for s in states):
            verdict = "SKIP"
        else:
            verdict = "PASS"
        detail = "; ".join(entry["details"])
        terminalreporter.write_line(f"{crit:<5} {verdict:<4}  {entry['title']}" + (f"  [{detail}]" if detail else ""))
