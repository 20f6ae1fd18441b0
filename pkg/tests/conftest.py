import numpy as np
import pytest

from bolab.spectral import Grid
from bolab.solitons import SolitonParams, soliton_profile


@pytest.fixture(scope="session")
def default_grid():
    return Grid(256.0, 4096)


@pytest.fixture(scope="session")
def analysis_grid():
    return Grid(256.0, 1024)


@pytest.fixture(scope="session")
def unit_soliton(default_grid):
    return soliton_profile(default_grid, SolitonParams(1.0, 0.0))


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
