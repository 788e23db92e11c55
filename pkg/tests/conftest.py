import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from squant import Codebook, FeatureSet


@pytest.fixture
def line_points():
    """Three points on the line used by several hand-derived examples."""
    return FeatureSet(np.array([[0.0], [1.0], [10.0]]))


@pytest.fixture
def two_pairs():
    """Two well-separated pairs of points; the optimal two centers sit at the
    pair midpoints."""
    return FeatureSet(np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]]))


@pytest.fixture
def random_instance():
    def make(seed, count=20, dim=2, n_centers=3, rank=2.0):
        rng = np.random.default_rng(seed)
        data = FeatureSet(rng.uniform(-1, 1, size=(count, dim)))
        codebook = Codebook(rng.uniform(-1, 1, size=(n_centers, dim)), rank=rank)
        return data, codebook

    return make
