import numpy as np
import pytest

from uavrelay import kernels
from uavrelay.scenario import Scenario, Trajectory, default_scenario


@pytest.fixture
def desk():
    return default_scenario()


@pytest.fixture
def tiny():
    """Four users, eight slots, one user per slot."""
    users = [[4000, 500, 0], [5200, -800, 0], [6100, 300, 0], [4800, 1500, 0]]
    return Scenario(users=users, users_per_slot=1, num_slots=8)


@pytest.fixture
def circle():
    return Trajectory((5000.0, 0.0), 800.0, 1000.0)


@pytest.fixture(params=["numba", "numpy"])
def kernel_flavour(request, monkeypatch):
    if request.param == "numba" and not kernels.HAVE_NUMBA:
        pytest.skip("numba not installed")
    monkeypatch.setattr(kernels, "USE_NUMBA", request.param == "numba")
    return request.param


def random_scenario(rng, G=10, N=64, M=2, std=2000.0):
    users = np.column_stack([rng.normal(5000, std, G), rng.normal(0, std, G), np.zeros(G)])
    return Scenario(users=users, users_per_slot=M, num_slots=N)


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
