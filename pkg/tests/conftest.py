import numpy as np
import pytest

from blendsem.physics import GasModel, state

_CRITERIA = {}


@pytest.fixture
def gas():
    return GasModel(1.4)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_states(rng, n, gas, rho=(0.1, 3.0), p=(0.1, 3.0), vel=1.0):
    return state(rng.uniform(*rho, n), rng.normal(0.0, vel, n), rng.normal(0.0, vel, n),
                 rng.uniform(*p, n), gas)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, text): exit criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, text = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        prev_text, prev_ok, notes = _CRITERIA.get(number, (text, True, []))
        notes = notes + [v for k, v in report.user_properties if k == "measured"]
        _CRITERIA[number] = (prev_text, prev_ok and report.outcome == "passed", notes)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        text, ok, notes = _CRITERIA[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {text}")
        for note in notes:
            terminalreporter.write_line(f"        {note}")
