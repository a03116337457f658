"""
RISNET tests
Shared scenarios at toy dimensions
"""

# External Imports
# Import only with "import package",
# it will make explicity in the code where it came from.
import pytest

# Internal imports
# Import only with "from x import y", to simplify the code.
from risnet.channel import PhaseConfig
from risnet.scenario import default_figure_scenario


@pytest.fixture
def toy():
    # NL / M is an integer, so the simulated and the real valued
    # sub-phase counts of the MMSE-DFT protocol agree.
    return default_figure_scenario("fig2", {"M": 8, "K": 3, "L": 2, "N": 4})


@pytest.fixture
def tiny():
    return default_figure_scenario("fig2", {"M": 4, "K": 2, "L": 1, "N": 2})


@pytest.fixture
def toy_theta(toy):
    return PhaseConfig.random(toy.L, toy.N, 11)


@pytest.fixture
def tiny_theta(tiny):
    return PhaseConfig.random(tiny.L, tiny.N, 5)
