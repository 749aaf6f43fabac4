import warnings

import pytest

import kppfront as kf

from oracle_values import C_STAR


@pytest.fixture(autouse=True)
def _quiet_admissibility_warnings():
    # many tests deliberately use data outside the admissible class
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="initial data .* outside the admissible")
        yield


@pytest.fixture(scope="session")
def semi_wave_mu1():
    return kf.solve_semi_wave(1.0, tol=1e-9)


@pytest.fixture(scope="session")
def wave_half_mu1():
    """Compact wave at mu = 1, c = 0.5 c*(1): the spreading-test profile."""
    return kf.solve_compact_wave(0.5 * C_STAR[1.0], 1.0, tol=1e-9)


@pytest.fixture(scope="session")
def wave_inv_mu2():
    """Compact wave at mu = 2, c = 0.9 c*(2): the invariance-test profile."""
    return kf.solve_compact_wave(0.9 * C_STAR[2.0], 2.0, tol=1e-9)
