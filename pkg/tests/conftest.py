import math

import numpy as np
import pytest

from qsteinitz.sphere import lift_north

_ACCEPTANCE_LINES = []


def record_acceptance(line):
    """Collect one acceptance result line; echoed in the terminal summary."""
    _ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def cross_polytope(d, scale=1.0):
    return np.vstack([np.eye(d), -np.eye(d)]) * scale


def ring(d=2, colatitude=math.pi / 4):
    """Lifted ``±e_i`` at the given colatitude about the north pole."""
    z = cross_polytope(d, math.tan(colatitude))
    return lift_north(z)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def square():
    return np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]])
