import numpy as np
import pytest

from timechange import SelfDecParams, brownian, build_timechanged, exponential_kernel, trivial_clock
from timechange.subordination import TimeChangedModel


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def identity_bm():
    return TimeChangedModel(brownian(0.0, 1.0), trivial_clock())


@pytest.fixture(scope="session")
def selfdec_1_05():
    return build_timechanged(SelfDecParams(1.0, 0.5))


@pytest.fixture(scope="session")
def unit_exp_bm():
    return TimeChangedModel(brownian(0.0, 1.0), exponential_kernel(0.0, 1.0, 1.0))
