import pytest

from skipgrid.gridworld import GridEnv, builtin_grid


@pytest.fixture
def cliff():
    return builtin_grid("cliff")


@pytest.fixture
def cliff_env(cliff):
    env = GridEnv(cliff)
    env.reset()
    return env


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
