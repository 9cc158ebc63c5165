import numpy as np
import pytest

from genvi import cubic_oscillator, harmonic_oscillator
from genvi.core import PhaseState


@pytest.fixture
def ho():
    return harmonic_oscillator()


@pytest.fixture
def cubic():
    return cubic_oscillator(0.1)


def random_states(seed, count, dim=1, scale=1.0):
    rng = np.random.default_rng(seed)
    return [
        PhaseState(scale * rng.uniform(-1.0, 1.0, dim), scale * rng.uniform(-1.0, 1.0, dim))
        for _ in range(count)
    ]
