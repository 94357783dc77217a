import numpy as np
import pytest

from compwave import StressModel, WaveAnsatz, build_case1


@pytest.fixture(scope="session")
def model():
    return StressModel(a=1.0, b=1.0, k=0.5)


@pytest.fixture(scope="session")
def data(model):
    return build_case1(model, 0.0, 2.0)


@pytest.fixture(scope="session")
def ans(model, data):
    return WaveAnsatz(model, data, mu=0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line; the summary prints them all at the end."""
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def record(number, title, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title}" + (f" | {detail}" if detail else "")
        lines.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
