import numpy as np
import pytest
from numpy.testing import assert_allclose

from ikchain import lax
from ikchain.lax import ModelParams
from ikchain.spectrum import transfer_matrix

IDENTITY_TOL = 1e-10


@pytest.mark.parametrize("which", lax.IDENTITIES)
def test_identities_at_random_points(params, rng, which):
    points = lax.random_points(rng, lax.ARITY[which], 100)
    report = lax.verify_identity(which, params, points)
    assert report.passed(IDENTITY_TOL), report


@pytest.mark.parametrize("which", ["qybe", "re", "dual_re"])
def test_identities_for_random_parameters(rng, which):
    for _ in range(10):
        params = ModelParams.random(rng)
        report = lax.verify_identity(which, params, lax.random_points(rng, lax.ARITY[which], 100))
        assert report.max_residual < IDENTITY_TOL


def test_verify_identity_rejects_wrong_arity(params):
    with pytest.raises(ValueError):
        lax.verify_identity("qybe", params, [(0.1, 0.2)])
    with pytest.raises(ValueError):
        lax.verify_identity("yang-baxter", params, [(0.1,)])


def test_corrupted_r_matrix_fails_qybe(params, rng, monkeypatch):
    original = lax.r_matrix

    def corrupted(p, u):
        r = original(p, u)
        r[1, 3] *= 1.1
        return r

    monkeypatch.setattr(lax, "r_matrix", corrupted)
    report = lax.verify_identity("qybe", params, lax.random_points(rng, 3, 10))
    assert report.max_residual > 1e-3


def test_r_matrix_initial_condition(params):
    eta = params.eta
    expected = (np.sinh(eta) - np.sinh(5 * eta)) * lax.permutation_matrix()
    assert_allclose(lax.r_matrix(params, 0.0), expected, atol=1e-14)


def test_r_matrix_periodicity(params):
    u = 0.4 - 0.9j
    assert_allclose(lax.r_matrix(params, u + 2j * np.pi), lax.r_matrix(params, u), atol=1e-12)


def test_unitarity_at_zero(params):
    eta = params.eta
    phi1 = lax.scalar_functions(params).phi1
    assert phi1(0.0) == pytest.approx(4 * np.sinh(2 * eta) ** 2 * np.cosh(3 * eta) ** 2)


def test_scalar_function_zeroes(params):
    fns = lax.scalar_functions(params)
    assert abs(fns.phi1(4 * params.eta)) < 1e-14
    assert abs(fns.phi3(-4 * params.eta)) < 1e-14


def test_k_left_at_zero(params):
    expected = (1 + 2 * np.exp(-params.eps) * np.sinh(params.eta)) * np.eye(3)
    assert_allclose(lax.k_left(params, 0.0), expected, atol=1e-14)


def test_k_left_off_diagonal(params):
    u = 0.3 + 0.2j
    expected = 2 * np.exp(-params.eps + 1j * params.sigma_l) * np.sinh(u)
    assert lax.k_left(params, u)[0, 2] == pytest.approx(expected)


def test_k_right_from_k_left(params, rng):
    primed = params.replace(eps=params.eps_prime, sigma_l=0.0)
    eta = params.eta
    for u in lax.random_points(rng, 1, 20)[:, 0]:
        # K^L with the right boundary's parameters, complex angle put back by hand
        k = lax.k_left(primed, -u + 6 * eta + 1j * np.pi)
        k[0, 2] *= np.exp(1j * params.sigma_r)
        k[2, 0] *= np.exp(-1j * params.sigma_r)
        assert_allclose(lax.k_right(params, u), lax.m_matrix(params) @ k, rtol=1e-12, atol=1e-12)


def test_lambda_at_special_points(params):
    dim = 3 ** params.n_sites
    eta = params.eta
    zero, i_pi = lax.lambda_at_zero(params), lax.lambda_at_i_pi(params)
    for u in (0.0, 6 * eta + 1j * np.pi):
        assert_allclose(transfer_matrix(params, u), zero * np.eye(dim), atol=1e-10 * abs(zero))
    for u in (1j * np.pi, 6 * eta):
        assert_allclose(np.linalg.eigvals(transfer_matrix(params, u)), np.full(dim, i_pi), rtol=1e-6)


@pytest.mark.parametrize(
    "changes",
    [
        {"eta": 0.0},
        {"eta": -0.1},
        {"n_sites": 0},
        {"sigma_l": 3.5},
        {"sigma_r_bar": -np.pi},
        {"thetas": (0.1,)},
    ],
)
def test_model_params_validation(params, changes):
    with pytest.raises(ValueError):
        params.replace(**changes)


def test_model_params_chis(params):
    assert params.chi_plus == pytest.approx(2.0178, abs=1e-3)
    assert params.chi_minus == pytest.approx(0.6320, abs=1e-3)
    assert params.chi_min == params.chi_minus
    assert lax.eps_from_chi(params.chi_plus) == pytest.approx(params.eps)


def test_model_params_replace_resets_thetas():
    inhomogeneous = ModelParams(eta=0.3, eps=1.0, eps_prime=1.0, n_sites=2, thetas=(0.1, -0.2))
    assert not inhomogeneous.homogeneous
    longer = inhomogeneous.replace(n_sites=3)
    assert longer.thetas == (0.0, 0.0, 0.0)
    assert longer.homogeneous
