import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20570)


def random_points(rng, num_modes, count, scale):
    """Pairs of complex coherent points with a common scale."""
    return [
        (scale * (rng.standard_normal(num_modes) + 1j * rng.standard_normal(num_modes)),
         scale * (rng.standard_normal(num_modes) + 1j * rng.standard_normal(num_modes)))
        for _ in range(count)
    ]
