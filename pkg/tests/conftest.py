import numpy as np
import pytest

from onionclass import from_terms


@pytest.fixture
def ghz():
    return from_terms((2, 2, 2), {(0, 0, 0): 1, (1, 1, 1): 1})


@pytest.fixture
def w_state():
    return from_terms((2, 2, 2), {(0, 0, 1): 1, (0, 1, 0): 1, (1, 0, 0): 1})


@pytest.fixture
def rng():
    return np.random.default_rng(20240810)
