import numpy as np
import pytest

from ftdoa import ArrayConfig

SIX_ANGLES = (0.0, 5.0, 10.0, 15.0, 20.0, 30.0)


@pytest.fixture
def ula100():
    return ArrayConfig(n_elements=100)


@pytest.fixture
def six_angles():
    return np.array(SIX_ANGLES)


def random_complex(rng, *shape):
    """Generic complex array with independent Gaussian parts."""
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
