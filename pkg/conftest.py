"""
Purpose: Shared pytest configuration. Solver-heavy checks carry the ``slow``
marker and only run with ``pytest --runslow``.
"""
import pytest

from oracles import qubit_guessing_probability
from scenarios import discrimination_optimum
from sdpcore import SolverConfig


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="run solver-heavy acceptance checks")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: solver-heavy acceptance check")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def solver_cfg():
    """Default solver settings, as the command line uses them."""
    return SolverConfig()


@pytest.fixture(scope="session")
def disc2_document():
    """Two-state discrimination with a vacuum bound, as a parsed document."""
    return {
        "name": "disc2",
        "scenario": {"n_x": 2, "outcomes": [2], "n_trunc": 0},
        "photon": {"variant": "bounds", "omega": 0.1},
        "witness": {"kind": "discrimination"},
        "relaxation": {"level": 1,
                       "extras": ["r*M", "r*r", "s0*r", "s0*M"],
                       "localizing": ["1", "r", "M"]},
    }


@pytest.fixture(scope="session")
def half_vacuum_oracle():
    """Qubit guessing probability at omega = 0.5, W just below its optimum."""
    value = discrimination_optimum(2, 0.5) - 1e-7
    return value, qubit_guessing_probability(0.5, value)
