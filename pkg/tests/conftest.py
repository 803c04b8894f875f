import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from tfdpdc.fock import BasisDescriptor

settings.register_profile("default", max_examples=50, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def small_basis():
    return BasisDescriptor.from_pairs(3, 2, 1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_state(basis, rng):
    from tfdpdc.fock import StateVector
    v = rng.normal(size=basis.total_dim) + 1j * rng.normal(size=basis.total_dim)
    return StateVector(basis, v)
