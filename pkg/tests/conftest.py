import numpy as np
import pytest

from gsqg import spectral
from gsqg.presets import RandomBand, build_ic

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def grid32():
    return spectral.Grid(32)


@pytest.fixture(scope="session")
def grid64():
    return spectral.Grid(64)


def sample(grid, func):
    """Evaluate ``func(x, y)`` on the grid and transform."""
    x, y = grid.coordinates
    return spectral.forward_transform(func(x, y), grid)


def random_field(grid, seed, band=None, decay=1.0):
    band = band or grid.n // 4
    return build_ic(RandomBand(seed=seed, decay_exponent=decay, band=band), grid)


def random_samples(grid, seed):
    return np.random.default_rng(seed).standard_normal(grid.shape)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
