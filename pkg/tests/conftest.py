import numpy as np
import pytest

import spin_anneal as sa


@pytest.fixture
def mobius8():
    return sa.mobius_ladder(8, 0.4)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
