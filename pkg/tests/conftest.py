import numpy as np
import pytest

from tridax import Precision, random_dominant_system


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def make_system(n, seed, precision=Precision.FP64, margin=1.0):
    return random_dominant_system(n, np.random.default_rng(seed), precision, margin)
