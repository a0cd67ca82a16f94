import numpy as np
import pytest

from clickfraud.model import ReducedGame, Scenario, reduce


def scenario_a_raw(lambda0=300.0):
    # two users with 100 streams each, both split 0.3 / 0.7
    return Scenario(n=2, m=2, user_streams=[100.0, 100.0],
                    stream_shares=[[0.3, 0.3], [0.7, 0.7]],
                    beta=0.7, delta=1.05, lambda0=lambda0)


@pytest.fixture
def scenario_a():
    return scenario_a_raw()


@pytest.fixture
def game_a(scenario_a):
    return reduce(scenario_a)


@pytest.fixture
def game_b():
    return ReducedGame.from_parameters([0.05, 0.15, 0.8], 0.5, 2.0)


@pytest.fixture
def game_c():
    return ReducedGame.from_parameters([0.1, 0.3, 0.6], 0.5, 3.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert."""
    lines = request.config.stash[ACCEPTANCE]

    def report(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append(line)
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
