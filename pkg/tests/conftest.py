import numpy as np
import pytest

from srgmrank.data.dataset import FailureDataset
from srgmrank.models.catalog import ModelId, synthesize_dataset
from srgmrank.optimizer.ssa import SsaConfig

GO_A = 100.0
GO_B = 0.1
WEEKLY_COUNTS = [2, 4, 7, 9, 12, 15, 17, 20, 22, 25, 27, 29, 31, 33, 35, 37, 38, 40, 41, 42, 43]


@pytest.fixture
def go_dataset():
    """Noise-free Goel-Okumoto observations, a=100, b=0.1, t=1..20"""
    return synthesize_dataset(ModelId.GoelOkumoto, [GO_A, GO_B], np.arange(1, 21), name="go")


@pytest.fixture
def weekly_dataset():
    return FailureDataset(np.arange(1, 22), WEEKLY_COUNTS, name="weekly")


@pytest.fixture
def tiny_dataset():
    return FailureDataset([1, 2, 3], [1, 2, 3], name="tiny")


@pytest.fixture
def fast_config():
    return SsaConfig(pop=20, max_iters=60, seed=3)


@pytest.fixture
def long_dataset():
    """Fifty observations ten time units apart, t_k = 500"""
    return FailureDataset(np.arange(10, 510, 10), np.arange(1, 51), name="long")
