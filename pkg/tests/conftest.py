import numpy as np
import pytest

from trbench.diagnostics import random_memory

__all__ = ["random_memory"]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
