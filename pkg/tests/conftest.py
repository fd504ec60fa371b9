import numpy as np
import pytest
from hypothesis import strategies as st

from bellpure import make_state


def simplex_points(rng, count, a_min=0.0):
    cuts = np.sort(rng.random((count, 3)), axis=1)
    u = np.diff(np.hstack([np.zeros((count, 1)), cuts, np.ones((count, 1))]), axis=1)
    if a_min:
        u = u * (1 - a_min)
        u[:, 0] += a_min
    return [make_state(*row) for row in u]


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@st.composite
def states(draw, a_min=0.0):
    raw = [draw(st.floats(0.0, 1.0)) for _ in range(4)]
    total = sum(raw)
    if total < 1e-6:
        raw, total = [1.0, 0.0, 0.0, 0.0], 1.0
    parts = [x / total for x in raw]
    if a_min:
        parts = [x * (1 - a_min) for x in parts]
        parts[0] += a_min
    return make_state(*parts)


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
