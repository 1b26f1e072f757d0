import numpy as np
import pytest

from ctmc_limit import validate
from ctmc_limit.corpus import random_corpus

CORPUS_SEED = 20261018


@pytest.fixture(scope="session")
def corpus():
    return random_corpus(CORPUS_SEED, count=200)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def two_state():
    return validate([[-1.0, 1.0], [3.0, -3.0]])


@pytest.fixture
def leak():
    return validate([[-1.0, 1.0], [0.0, 0.0]])


@pytest.fixture
def split3():
    return validate([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [1.0, 2.0, -3.0]])


@pytest.fixture
def ruin():
    # symmetric gambler's ruin on {0,1,2,3}; 0 and 3 absorb
    return validate([[0, 0, 0, 0], [1, -2, 1, 0], [0, 1, -2, 1], [0, 0, 0, 0]])


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
