import numpy as np
import pytest

from commdim import _kernels

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session", autouse=True)
def _compiled_kernels():
    # compile (or load from cache) once, so timed tests measure the algorithms
    _kernels.warmup()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_stochastic(rng, n, m, zeros=0.0):
    X = rng.random((n, m))
    if zeros:
        X[rng.random((n, m)) < zeros] = 0.0
        X[X.sum(axis=1) == 0, 0] = 1.0
    return X / X.sum(axis=1, keepdims=True)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
