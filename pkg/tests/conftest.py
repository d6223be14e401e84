import numpy as np
import pytest

from markfield import PointPattern, build_graph


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_pattern(rng, n=50, Q=2):
    pts = rng.random((n, 2))
    marks = rng.integers(1, Q + 1, size=n)
    # every category must occur at least once for Q to be honest
    marks[:Q] = np.arange(1, Q + 1)
    return PointPattern(xs=pts[:, 0], ys=pts[:, 1], marks=marks, Q=Q)


@pytest.fixture
def small_pattern(rng):
    return random_pattern(rng, n=40, Q=2)


@pytest.fixture
def small_graph(small_pattern):
    return build_graph(small_pattern, 0.25)
