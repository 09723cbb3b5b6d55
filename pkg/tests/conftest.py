import pytest

from trisector.geometry import parabola_source, trace
from trisector.solver import Branch, solve_branch


@pytest.fixture(scope="session")
def alpha5():
    return trace(parabola_source(5), -1.0, 1.0, 4001)


@pytest.fixture(scope="session")
def deep_trace():
    return trace(parabola_source(6), -0.4, 0.4, 4001)


@pytest.fixture(scope="session")
def sol20():
    return {b: solve_branch(b, 20) for b in Branch}
