from __future__ import annotations

import pytest

from bathybands import SpectralGrid, from_cosine_series, flat_profile


@pytest.fixture(scope="session")
def cos2x():
    """b(x) = 2 cos 2x: coefficients b_{+-2} = 1."""
    return from_cosine_series([(2, 2.0, 0.0)])


@pytest.fixture(scope="session")
def cos1x():
    """b(x) = 2 cos x: coefficients b_{+-1} = 1."""
    return from_cosine_series([(1, 2.0, 0.0)])


@pytest.fixture(scope="session")
def cos13x():
    """b(x) = 2 cos x + 2 cos 3x: b_{+-1} = b_{+-3} = 1, b_{+-2} = 0."""
    return from_cosine_series([(1, 2.0, 0.0), (3, 2.0, 0.0)])


@pytest.fixture(scope="session")
def cos4x():
    return from_cosine_series([(4, 2.0, 0.0)])


@pytest.fixture(scope="session")
def flat():
    return flat_profile()


@pytest.fixture(scope="session")
def small_grid():
    """Cheap grid for unit tests; full resolution lives in the acceptance suite."""
    return SpectralGrid(n_x=32, n_z=16, oversample=4)


@pytest.fixture(scope="session")
def full_grid():
    return SpectralGrid(n_x=64, n_z=32, oversample=4)


@pytest.fixture(scope="session")
def spectrum_cache():
    """Memoized solves shared across test modules (they are the slow part)."""
    from bathybands import assemble_dno

    cache = {}

    def get(profile, epsilon, theta, grid):
        key = (profile.digest(), epsilon, theta, grid)
        if key not in cache:
            cache[key] = assemble_dno(profile, epsilon, theta, grid)
        return cache[key]

    return get
