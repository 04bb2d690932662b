import numpy as np
import pytest

from ikchain.lax import ModelParams


@pytest.fixture
def params():
    """The regime II chain used throughout: eta = 0.35, eps = 2, eps' = 0.3, N = 2"""
    return ModelParams(eta=0.35, eps=2.0, eps_prime=0.3, sigma_l=0.6, sigma_r_bar=0.7, n_sites=2)


@pytest.fixture
def regime1_params():
    # chi+ ~ 2.03 and chi- ~ 1.50, both above 3 eta
    return ModelParams(eta=0.35, eps=2.0, eps_prime=1.5, sigma_l=0.6, sigma_r_bar=0.7, n_sites=2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
