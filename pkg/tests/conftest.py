import numpy as np
import pytest

from algebra.clifford import Signature
from geometry.catalog import flat, round_sphere
from utils.config import get_settings


@pytest.fixture(autouse=True)
def fresh_settings():
    """Settings are cached per process; tests that set SPINCYL_* see a clean copy"""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def flat2():
    return flat(Signature(2, 0))


@pytest.fixture
def sphere2():
    return round_sphere(2)
