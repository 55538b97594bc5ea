import numpy as np
import pytest

from elt.harness import iris_path, load_csv


@pytest.fixture(scope="session")
def iris():
    return load_csv(iris_path(), "species")


@pytest.fixture
def blobs():
    """Two well separated 2-D clusters."""
    rng = np.random.default_rng(0)
    x = np.vstack([rng.normal(-5, 1, size=(30, 2)), rng.normal(5, 1, size=(30, 2))])
    y = np.repeat([0, 1], 30)
    return x, y
