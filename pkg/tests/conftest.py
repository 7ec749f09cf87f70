import numpy as np
import pytest

from artifact.measures import SubProbability, random_subprobability
from artifact.metric_space import interval


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small():
    """21-point grid on [0, 2]; Z = {0, 2}."""
    return interval(0.0, 2.0, 21)


def atom(space, x, mass=1.0):
    w = np.zeros(space.n)
    w[space.index_of(x)] = mass
    return SubProbability(space, w)


def random_pair(space, rng, **kw):
    return random_subprobability(space, rng, **kw), random_subprobability(space, rng, **kw)
