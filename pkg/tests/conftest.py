import sys
from fractions import Fraction

import pytest

from rpqverify.cases import sample_points
from rpqverify.scalars import DEFAULT_REGISTRY, SamplePoint

PRESETS = list(DEFAULT_REGISTRY)


@pytest.fixture(scope="session")
def points():
    pts, _ = sample_points(0, 4, 3, PRESETS)
    return pts


@pytest.fixture(scope="session")
def sp(points):
    return points[0]


@pytest.fixture
def js_half_third():
    return SamplePoint(1, Fraction(1, 2), Fraction(1, 3))


def pytest_terminal_summary(terminalreporter):
    acc = sys.modules.get("test_acceptance")
    if acc is None or not acc.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(acc.RESULTS):
        terminalreporter.write_line(acc.summary_line(n))
