from fractions import Fraction as F

import pytest
from hypothesis import strategies as st

from ivbounds.law import CELLS, law_from_counts, law_from_pmfs


def pmf(**kw):
    """pmf(p00=..., p01=...) keyed by "xy"."""
    return {k[1:]: v for k, v in kw.items()}


@pytest.fixture
def example_law():
    # arm 1: {00:.5, 01:.3, 10:.1, 11:.1}; arm 2: {00:.2, 01:.1, 10:.3, 11:.4}
    return law_from_pmfs(
        [
            {"00": F(5, 10), "01": F(3, 10), "10": F(1, 10), "11": F(1, 10)},
            {"00": F(2, 10), "01": F(1, 10), "10": F(3, 10), "11": F(4, 10)},
        ],
        ["a", "b"],
    )


@pytest.fixture
def perfect_law():
    # arm 1 always untreated with P(y=1)=0.4, arm 2 always treated with P(y=1)=0.7
    return law_from_pmfs(
        [
            {"00": F(6, 10), "01": F(4, 10), "10": 0, "11": 0},
            {"00": 0, "01": 0, "10": F(3, 10), "11": F(7, 10)},
        ],
        ["control", "treat"],
    )


@st.composite
def count_laws(draw, min_k=1, max_k=4):
    """Exact laws from random integer counts, every arm nonempty."""
    K = draw(st.integers(min_k, max_k))
    rows = []
    for z in range(K):
        counts = draw(st.lists(st.integers(0, 12), min_size=4, max_size=4).filter(any))
        rows += [(f"z{z}", x, y, n) for (x, y), n in zip(CELLS, counts)]
    return law_from_counts(rows)


# acceptance summary: one line per criterion

_criteria: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion number and summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, text = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        if hasattr(rep, "wasxfail"):
            status = "XFAIL" if rep.skipped else "XPASS"
        else:
            status = "PASS" if rep.passed else "FAIL"
        _criteria.setdefault((n, item.name), (text, status))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for (n, name), (text, status) in sorted(_criteria.items()):
        terminalreporter.write_line(f"[{status:5}] {n:>2}. {text}  ({name})")
