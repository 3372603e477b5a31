import numpy as np
import pytest
from hypothesis import strategies as st

from robust_kelly.uncertainty import make_uncertainty_set


def random_pset(rng, max_intervals=3, min_measure=0.01):
    """1..max_intervals disjoint intervals in [0, 1] with total length > min_measure."""
    while True:
        m = int(rng.integers(1, max_intervals + 1))
        pts = np.sort(rng.uniform(0.0, 1.0, size=2 * m))
        pairs = [(pts[2 * i], pts[2 * i + 1]) for i in range(m)]
        if any(hi - lo <= 1e-9 for lo, hi in pairs):
            continue
        # keep intervals separated so normalization does not merge them
        if any(pairs[i + 1][0] - pairs[i][1] <= 1e-9 for i in range(m - 1)):
            continue
        pset = make_uncertainty_set(pairs)
        if pset.measure > min_measure:
            return pset


@st.composite
def psets(draw, max_intervals=3, min_measure=0.01):
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    return random_pset(np.random.default_rng(seed), max_intervals, min_measure)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def unit():
    return make_uncertainty_set([(0.0, 1.0)])


@pytest.fixture
def example2():
    return make_uncertainty_set([(0.25, 0.95)])


# one PASS/FAIL line per acceptance criterion in the terminal summary
_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None and report.when in ("setup", "call"):
        number, title = marker.args
        entry = _criteria.setdefault(number, {"title": title, "ok": True, "failed": []})
        if report.failed:
            entry["ok"] = False
            entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        status = "PASS" if entry["ok"] else "FAIL"
        line = f"{status}  criterion {number:>2}: {entry['title']}"
        if entry["failed"]:
            line += f"  (failing: {', '.join(entry['failed'])})"
        terminalreporter.write_line(line)
