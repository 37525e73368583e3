"""Shared fixtures: the four reference generators used across the test suite."""

import numpy as np
import pytest

from homquant import make_dilation

GENERATORS = {
    "identity2": np.eye(2),
    "diag321": np.diag([3.0, 2.0, 1.0]),
    "shear2": np.array([[1.5, 0.6], [0.0, 1.0]]),
    "rotate2": np.array([[2.0, -1.5], [1.0, 1.0]]),
}


@pytest.fixture(params=sorted(GENERATORS), ids=sorted(GENERATORS))
def any_dilation(request):
    return make_dilation(GENERATORS[request.param])


@pytest.fixture
def diag321():
    return make_dilation(GENERATORS["diag321"])


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)
