import numpy as np
import pytest

from hamdelay.audit import random_smooth_loop


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture
def smooth_loop(rng):
    def make(n=1, N=64, **kw):
        return random_smooth_loop(rng, n, N, **kw)

    return make


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per acceptance criterion."""
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def record(label, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'}  {label}: {detail}"
        lines.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
