import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def central_diff(f, x, h=1e-5):
    return (f(x + h) - f(x - h)) / (2 * h)
