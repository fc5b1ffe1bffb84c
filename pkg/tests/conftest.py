import numpy as np
import pytest
from hypothesis import settings

from worldtrack.simulator import ScenarioConfig, generate

settings.register_profile("ci", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("ci")

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture(scope="session")
def small_scenario():
    return generate(ScenarioConfig(seed=1, duration_frames=1200, num_objects=10))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
