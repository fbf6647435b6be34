import pytest

from exact_solver import solve_exact
from model_core import make_params
from spectrum_cache import SPECTRUM_CACHE

REFERENCE_N = 2000
REFERENCE_DE = 1e-4
REFERENCE_W = 1.0 / 3000.0


@pytest.fixture(scope="session")
def reference_params():
    return make_params(REFERENCE_N, REFERENCE_DE, REFERENCE_W)


@pytest.fixture(scope="session")
def reference_spectrum(reference_params):
    return solve_exact.uncached(reference_params)


@pytest.fixture
def small_params():
    return make_params(8, 0.5, 0.2)


@pytest.fixture
def clean_cache():
    SPECTRUM_CACHE.clear()
    yield SPECTRUM_CACHE
    SPECTRUM_CACHE.clear()
