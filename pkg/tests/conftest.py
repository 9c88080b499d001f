import numpy as np
import pytest

from excitondecoh import ModelParams, SuperpositionSpec, build_grid
from excitondecoh.bath_oracle import BathPropagator


@pytest.fixture(scope="session")
def fig1():
    return ModelParams(omega=1500.0, gamma=0.05, big_m=20.0)


@pytest.fixture(scope="session")
def cat01():
    # |alpha|^2 = 0.01
    return SuperpositionSpec.cat(0.1)


@pytest.fixture(scope="session")
def small_grid(fig1):
    return build_grid(fig1, 50, 401)


@pytest.fixture(scope="session")
def small_prop(fig1, small_grid):
    return BathPropagator(small_grid, fig1)


@pytest.fixture(scope="session")
def wide_prop(fig1):
    # wide band, used where the truncated Lorentzian tail matters
    return BathPropagator(build_grid(fig1, 200, 2001), fig1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def record(request):
    """Log one PASS/FAIL line for an acceptance criterion."""
    results = request.config.stash.setdefault(_ACCEPTANCE, [])

    def _record(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        results.append(line)
        print(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_ACCEPTANCE, [])
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)
