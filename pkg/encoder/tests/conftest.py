import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from image_fixtures import synthetic_images


@pytest.fixture
def four_class_images():
    return synthetic_images(4, 40, seed=3)
