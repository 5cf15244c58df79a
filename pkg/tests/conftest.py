import numpy as np
import pytest

from sphereform import normalize, rodrigues


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_unit(rng, n=None):
    """Uniform random unit vector(s) via normalized Gaussians."""
    if n is None:
        return normalize(rng.normal(size=3))
    g = rng.normal(size=(n, 3))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def random_rotation(rng):
    return rodrigues(random_unit(rng), rng.uniform(0.0, np.pi))
