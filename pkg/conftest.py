import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from core.grid import annulus, make_grid  # noqa: E402
from service.sources import TORUS_GRID  # noqa: E402


@pytest.fixture(scope="session")
def unit_ball():
    """Polynomial test fields of degree < 16 are exact here."""
    return make_grid(6, 16, 1.0)


@pytest.fixture(scope="session")
def unit_shell():
    """r^(-l-1) stays well conditioned for l <= 6."""
    return annulus(make_grid(6, 24, 1.0), 0.5)


@pytest.fixture(scope="session")
def wide_ball():
    """Room for Gaussian envelopes exp(-r^2)."""
    return make_grid(6, 48, 6.0)


@pytest.fixture(scope="session")
def source_grid():
    return make_grid(8, 48, 8.0)


@pytest.fixture(scope="session")
def anapole_grid():
    """Resolves the default toroidal solenoid out to r_max."""
    return make_grid(*TORUS_GRID)


@pytest.fixture
def rng():
    return np.random.default_rng(1337)
