import math

import numpy as np
import pytest
from hypothesis import settings

from landau_clusters import Potential

settings.register_profile("ci", max_examples=40, deadline=None)
settings.load_profile("ci")

GAMMA2_GAUSSIAN = 1.0 / (4.0 * math.sqrt(2.0 * math.pi))
GAMMA3_GAUSSIAN = 1.0 / (8.0 * math.pi * math.sqrt(3.0))


def gaussian_interval_mass(alpha, beta):
    """mu([alpha, beta]) for e^{-|x|^2}, B = 1, by inverting the radial Radon profile."""
    c = 2.0 * math.sqrt(math.pi)
    return 2.0 * (math.sqrt(math.log(1.0 / (c * alpha))) - math.sqrt(math.log(1.0 / (c * beta))))


@pytest.fixture
def gaussian():
    return Potential.gaussian()


@pytest.fixture
def inv_square():
    """<x>^{-2}."""
    return Potential.power_decay(2.0)


@pytest.fixture
def inv_cube():
    """<x>^{-3}."""
    return Potential.power_decay(3.0)


@pytest.fixture
def zero():
    return Potential.zero()


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)
