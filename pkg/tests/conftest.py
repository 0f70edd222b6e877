import numpy as np
import pytest

from uncbench.selftest import random_instance


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def instance(rng):
    return random_instance(rng)


def instance_from_seed(seed, dims=(2, 8)):
    return random_instance(np.random.default_rng(seed), dims)
