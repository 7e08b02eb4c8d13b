import numpy as np
import pytest

# Scoreboard lines appended by tests/test_acceptance.py; echoed after the run
# so they stay visible under default output capture.
ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance scoreboard")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
