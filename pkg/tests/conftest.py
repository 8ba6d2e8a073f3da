import numpy as np
import pytest

from occnlos.geometry import FlatOccluder, Interval, room


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def two_occluder_room():
    """1 m walls 2 m apart with the two-occluder arrangement used throughout."""
    occ = [FlatOccluder(1.0, (Interval(0.45, 0.55),)),
           FlatOccluder(0.6, (Interval(0.15, 0.30),))]
    return room(D=2.0, occluders=occ)


def random_flat_occluder(rng, D=2.0, width=1.0):
    h = rng.uniform(0.1, 0.9) * D
    lo = rng.uniform(0.0, 0.8) * width
    return FlatOccluder(h, (Interval(lo, lo + rng.uniform(0.05, 0.2) * width),))
