import numpy as np
import pytest

from elastic_inclusion.media import ElasticMedium


@pytest.fixture
def exterior():
    return ElasticMedium(1.0, 1.0, 1.0, 8.0)


@pytest.fixture
def interior():
    return ElasticMedium(2.0, 2.0, 1.0, 8.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
