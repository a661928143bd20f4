import numpy as np
import pytest

from wxds.harness.benchmarks import diagonal_example, fom_system


@pytest.fixture(scope='session')
def fom():
    return fom_system()


@pytest.fixture
def diag_sys():
    return diagonal_example()


@pytest.fixture
def rng():
    return np.random.default_rng(20190801)
