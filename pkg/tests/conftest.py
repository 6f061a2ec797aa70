import os
import sys

import numpy as np
import pytest

HERE = os.path.dirname(__file__)
sys.path.insert(0, HERE)

WINE_CSV = os.path.join(HERE, os.pardir, "data", "wine.csv")
FIXTURES = os.path.join(HERE, "fixtures")


def random_instance(rng, max_n=30, max_d=4, max_m=3, max_k=5):
    """Random continuous training set with >= 2 classes, plus queries and k."""
    m = int(rng.integers(2, max_m + 1))
    n = int(rng.integers(m, max_n + 1))
    d = int(rng.integers(1, max_d + 1))
    y = np.concatenate([np.arange(m), rng.integers(0, m, n - m)])
    rng.shuffle(y)
    labels = np.array([f"c{v}" for v in y])
    X = rng.normal(size=(n, d)) + y[:, None] * rng.uniform(0, 2)
    queries = rng.normal(size=(5, d)) + rng.uniform(0, m, size=(5, 1))
    k = int(rng.integers(1, max_k + 1))
    return X, labels, queries, k


@pytest.fixture
def wine_path():
    return os.path.abspath(WINE_CSV)


@pytest.fixture
def fixtures_dir():
    return FIXTURES
