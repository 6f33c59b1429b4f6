import numpy as np
import pytest

from hnoma.channel import draw_frame, trial_streams
from hnoma.model import SystemConfig, build_topology

ACCEPTANCE_LINES = []


def record(criterion, passed, detail=""):
    line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'}" + (f" ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def config():
    return SystemConfig()


@pytest.fixture
def draws():
    """Return a factory of frame draws on the default geometry."""
    def make(n, direction="ul", system=None, seed=123):
        system = system or SystemConfig()
        topo = build_topology(system, direction)
        return [draw_frame(topo, system, trial_streams(seed, t)) for t in range(n)]
    return make


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
