import numpy as np
import pytest

from fixdelay import SeedConstraints
from fixdelay import catalog


@pytest.fixture
def mild_delay():
    return catalog.mild_sinusoid()


@pytest.fixture
def near_critical_delay():
    return catalog.near_critical_sinusoid()


@pytest.fixture
def mild_constraints(mild_delay):
    return SeedConstraints.from_delay(mild_delay, 1.0)


@pytest.fixture
def near_critical_constraints(near_critical_delay):
    return SeedConstraints.from_delay(near_critical_delay, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
