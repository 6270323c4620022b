import math

import numpy as np
import pytest
from hypothesis import settings

from framesplit.gen import named_frame
from framesplit.linalg import HermitianOperator
from framesplit.splitting import SplitPair

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

E1 = np.array([1.0, 0.0])
E2 = np.array([0.0, 1.0])
DIAG_SPLIT = ((1, 1), (1, 0), (0, 1))


@pytest.fixture
def onb2():
    return named_frame("onb2")


@pytest.fixture
def double_onb2():
    return named_frame("double_onb2")


@pytest.fixture
def mb3():
    return named_frame("mb3")


@pytest.fixture
def weighted_onb():
    return named_frame("weighted_onb")


@pytest.fixture
def projector_split():
    """(I, diag(1,0), diag(0,1))."""
    return SplitPair(HermitianOperator.identity(2), HermitianOperator.diag([1, 0]),
                     HermitianOperator.diag([0, 1]))


@pytest.fixture
def halves_split():
    """(2I, I, I); the residuals are U = V = I/2."""
    return SplitPair.from_parts(HermitianOperator.identity(2), HermitianOperator.identity(2))


def random_hermitian(rng, n, psd=False):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return g @ g.conj().T if psd else (g + g.conj().T) / 2


SQ = math.sqrt


def pytest_terminal_summary(terminalreporter):
    from .acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
