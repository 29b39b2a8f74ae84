import numpy as np
import pytest

from support import groupoid_a4


@pytest.fixture
def A():
    return groupoid_a4()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
