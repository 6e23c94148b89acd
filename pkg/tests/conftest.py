from datetime import datetime, timezone

import pytest

from sugraph import ReleaseNode, Universe


def day(text: str) -> datetime:
    return datetime.fromisoformat(text).replace(tzinfo=timezone.utc)


# t separates the two states of the temporal example: a3 arrives after it
T_BEFORE = day("2010-12-31")
T_AFTER = day("2011-03-01")


def figure_universe() -> Universe:
    """The 8-node example: projects a, q, x with a3 released after T_BEFORE."""
    times = {
        "x1": "2010-01-01", "q1": "2010-02-01", "a1": "2010-03-01", "q2": "2010-04-01",
        "x2": "2010-05-01", "a2": "2010-06-01", "q3": "2010-07-01", "a3": "2011-02-01",
    }
    u = Universe(ReleaseNode(k[0], k[1], day(v)) for k, v in times.items())
    for a, b in [("a1", "a2"), ("a2", "a3"), ("q1", "q2"), ("q2", "q3"), ("x1", "x2")]:
        u.add_update((a[0], a[1]), (b[0], b[1]))
    for a, b in [("a1", "x1"), ("q1", "x1"), ("q2", "x1"), ("a2", "x2"), ("q3", "x2"), ("a3", "x2")]:
        u.add_dependency((a[0], a[1]), (b[0], b[1]))
    return u


def k(label: str):
    return (label[0], label[1:])


@pytest.fixture
def fig():
    return figure_universe()


# Acceptance criteria report: every test marked ``criterion("...")`` gets one
# PASS/FAIL line in the terminal summary, whatever the verbosity.
_VERDICTS: dict[str, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    name = marker.args[0]
    if report.failed:
        _VERDICTS[name] = "FAIL"
    elif report.when == "call" and report.passed:
        _VERDICTS.setdefault(name, "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, verdict in _VERDICTS.items():
        terminalreporter.write_line(f"{verdict}  {name}")
