import numpy as np
import pytest

from ttdbeam import SolverParams, SystemConfig, build_dictionary, default_max_delay


@pytest.fixture
def cfg_small() -> SystemConfig:
    # small subcarrier count keeps full-grid pattern tests fast
    return SystemConfig(16, 48, 28e9, 3e9)


@pytest.fixture
def cfg_tiny() -> SystemConfig:
    return SystemConfig(4, 8, 28e9, 3e9)


@pytest.fixture(scope="session")
def cfg_dict() -> SystemConfig:
    return SystemConfig(16, 120, 28e9, 3e9)


@pytest.fixture(scope="session")
def small_dict(cfg_dict):
    params = SolverParams(
        max_delay=default_max_delay(cfg_dict), n_iterations=5, delay_grid_size=65536
    )
    return build_dictionary(cfg_dict, 41, params)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260811)
