import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from droneswitch.config import baseline_scenario  # noqa: E402
from droneswitch.cost_model import DT, TO, omega_coeffs  # noqa: E402


@pytest.fixture(scope="session")
def scenario():
    return baseline_scenario()


@pytest.fixture(scope="session")
def params(scenario):
    return scenario.cost


@pytest.fixture(scope="session")
def econ(scenario):
    return scenario.econ


@pytest.fixture(scope="session")
def coeffs(params):
    return omega_coeffs((TO, DT(10)), params)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
