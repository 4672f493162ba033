import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pseudomotion import gen_pattern


@pytest.fixture
def blobs32():
    return gen_pattern("random-blobs", 32, seed=7)


@pytest.fixture
def blobs64():
    return gen_pattern("random-blobs", 64, seed=11)


def random_image(rng, size=16, channels=3):
    return rng.random((size, size, channels)).astype(np.float32)
