import numpy as np
import pytest

import hololink as hl


@pytest.fixture(scope="session")
def constants():
    """Calibrated line constants, measured once per session."""
    return hl.calibrate(hl.QuadConfig(tol=1e-6))


@pytest.fixture()
def cfg():
    return hl.QuadConfig()


@pytest.fixture()
def fast_cfg():
    return hl.QuadConfig(tol=1e-4)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260816)
