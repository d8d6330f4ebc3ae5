import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from sparselp.core import Problem, example1

settings.register_profile(
    "default", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def ex1() -> Problem:
    return example1()


@pytest.fixture
def rng():
    return np.random.default_rng(20181)
