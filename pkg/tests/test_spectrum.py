import numpy as np
import pytest
from numpy.testing import assert_allclose

from ikchain import lax, spectrum
from ikchain.errors import HomogeneityError, SizeCapError
from ikchain.lax import ModelParams

RELATION_TOL = 1e-8


def test_single_site_monodromy(params):
    one = params.replace(n_sites=1)
    u = 0.3 + 0.4j
    t, _ = spectrum.monodromy(one, u)
    r = lax.r_matrix(one, u).reshape(3, 3, 3, 3)
    # T[a, b] acts on the site: <a c| R |b d>
    assert_allclose(t, r.transpose(0, 2, 1, 3), atol=1e-14)


def test_monodromy_factor_order(params):
    inhomogeneous = params.replace(thetas=(0.2, -0.3))
    u = 0.1 - 0.5j
    _, t_hat = spectrum.monodromy(inhomogeneous, u)

    r10 = lax.embed(lax.r_matrix(inhomogeneous, u + 0.2j), (1, 0))
    r20 = lax.embed(lax.r_matrix(inhomogeneous, u - 0.3j), (2, 0))
    as_written = (r10 @ r20).reshape(3, 9, 3, 9).transpose(0, 2, 1, 3)
    reversed_order = (r20 @ r10).reshape(3, 9, 3, 9).transpose(0, 2, 1, 3)
    assert_allclose(t_hat, as_written, atol=1e-12)
    assert np.max(np.abs(t_hat - reversed_order)) > 1e-6


def test_apply_transfer_matches_dense(params, rng):
    vectors = rng.normal(size=(9, 3)) + 1j * rng.normal(size=(9, 3))
    u = -0.4 + 0.9j
    dense = spectrum.transfer_matrix(params, u)
    assert_allclose(spectrum.apply_transfer(params, u, vectors), dense @ vectors, atol=1e-10)
    assert_allclose(spectrum.TransferOperator(params).apply(u, vectors[:, 0]), dense @ vectors[:, 0], atol=1e-10)


def test_transfer_matrices_commute(params):
    a = spectrum.transfer_matrix(params, 0.3 + 0.2j)
    b = spectrum.transfer_matrix(params, -0.8 + 1.1j)
    assert np.max(np.abs(a @ b - b @ a)) < 1e-9 * np.max(np.abs(a)) * np.max(np.abs(b))


def test_hamiltonian_is_hermitian(params):
    ham = spectrum.hamiltonian_explicit(params)
    assert np.max(np.abs(ham - ham.conj().T)) < 1e-12


def test_hamiltonian_from_transfer(params):
    assert_allclose(
        spectrum.hamiltonian_from_transfer(params), spectrum.hamiltonian_explicit(params), atol=1e-8
    )


def test_hamiltonian_from_transfer_random(rng):
    params = ModelParams.random(rng, n_sites=3)
    assert_allclose(
        spectrum.hamiltonian_from_transfer(params), spectrum.hamiltonian_explicit(params), atol=1e-7
    )


def test_periodic_hamiltonian_from_transfer(params):
    three = params.replace(n_sites=3)
    from_transfer = np.linalg.eigvals(spectrum.hamiltonian_from_transfer(three, spectrum.PERIODIC))
    explicit = np.linalg.eigvalsh(spectrum.hamiltonian_explicit(three, spectrum.PERIODIC))
    assert np.max(np.abs(from_transfer.imag)) < 1e-6
    assert_allclose(np.sort(from_transfer.real), explicit, atol=1e-6)


def test_left_field_vanishes_for_large_eps(params):
    assert np.max(np.abs(spectrum.left_field(params.replace(eps=60.0)))) < 1e-20


def test_single_site_energies(params):
    one = params.replace(n_sites=1)
    result = spectrum.diagonalize(one)
    assert result.dimension == 3
    assert np.sum(result.energies) == pytest.approx(np.trace(spectrum.hamiltonian_explicit(one)).real)


def test_explicit_hamiltonian_needs_homogeneous_chain(params):
    with pytest.raises(HomogeneityError, match="valid only at"):
        spectrum.hamiltonian_explicit(params.replace(thetas=(0.1, 0.0)))
    with pytest.raises(HomogeneityError):
        spectrum.hamiltonian_from_transfer(params.replace(thetas=(0.1, 0.0)))


def test_size_cap(params):
    with pytest.raises(SizeCapError, match="size cap"):
        spectrum.transfer_matrix(params.replace(n_sites=3), 0.1, cap=2)
    with pytest.raises(SizeCapError):
        spectrum.diagonalize(params.replace(n_sites=9))


def test_unknown_boundary_kind(params):
    with pytest.raises(ValueError):
        spectrum.diagonalize(params, "twisted")


def test_diagonalize_sorts_energies(params):
    result = spectrum.diagonalize(params)
    assert result.dimension == 9
    assert np.all(np.diff(result.energies) >= 0)
    assert result.lambda_curves.shape == (9, len(result.u_grid))
    assert len(result.curve(4)) == len(result.u_grid)


def test_curves_are_eigenvalues(params):
    result = spectrum.diagonalize(params, states=[0, 3])
    u = result.u_grid[5]
    vectors = result.eigenvectors[:, [0, 3]]
    t_v = spectrum.transfer_matrix(params, u) @ vectors
    assert_allclose(t_v, vectors * result.lambda_curves[:, 5][None, :], atol=1e-9 * np.max(np.abs(t_v)))


def test_functional_relations_open(params):
    report = spectrum.check_functional_relations(spectrum.diagonalize(params))
    assert report.max_residual < RELATION_TOL, report.worst()


def test_functional_relations_periodic(params):
    result = spectrum.diagonalize(params.replace(n_sites=3), spectrum.PERIODIC)
    report = spectrum.check_functional_relations(result)
    assert report.max_residual < RELATION_TOL, report.worst()


def test_asymptotics_far_out(params):
    result = spectrum.diagonalize(params)
    n, eta = params.n_sites, params.eta
    c0 = lax.asymptotic_coefficient(params)
    u = 40.0 + 0.2j
    values = spectrum.eigenvalues_at(result, u)
    scaled = values * np.exp(-(2 * n + 2) * u + 6 * (n + 1) * eta)
    assert_allclose(scaled, np.full(len(values), c0), rtol=1e-6)


def test_spectrum_cache_round_trip(params, tmp_path):
    cache = spectrum.SpectrumCache(str(tmp_path))
    first = spectrum.diagonalize(params, cache=cache)
    assert len(list(tmp_path.iterdir())) == 1
    second = spectrum.diagonalize(params, cache=cache)
    assert_allclose(second.energies, first.energies)
    assert second.states == first.states


@pytest.mark.parametrize("draw", range(3))
def test_functional_relations_open_inhomogeneous(rng, draw):
    params = ModelParams.random(rng, n_sites=2, inhomogeneous=True)
    assert not params.homogeneous
    report = spectrum.check_functional_relations(spectrum.diagonalize(params))
    assert report.max_residual < RELATION_TOL, report.worst()


def test_functional_relations_periodic_inhomogeneous(params):
    three = params.replace(n_sites=3, thetas=(0.11, -0.07, 0.19))
    report = spectrum.check_functional_relations(spectrum.diagonalize(three, spectrum.PERIODIC))
    assert report.max_residual < RELATION_TOL, report.worst()


def test_inhomogeneous_spectrum_reduces_to_hamiltonian(params):
    energies, imaginary, _ = spectrum._inhomogeneous_spectrum(params, spectrum.OPEN, spectrum.SIZE_CAP)
    assert_allclose(energies, spectrum.diagonalize(params).energies, atol=1e-6)
    assert np.max(np.abs(imaginary)) < 1e-6


def test_inhomogeneous_spectrum_diagonalizes_transfer_matrix(params):
    inhomogeneous = params.replace(thetas=(0.13, -0.21))
    energies, _, vectors = spectrum._inhomogeneous_spectrum(inhomogeneous, spectrum.OPEN, spectrum.SIZE_CAP)
    assert np.all(np.diff(energies) >= 0)
    u = -0.42 + 0.9j
    t_v = spectrum.transfer_matrix(inhomogeneous, u) @ vectors
    lam = spectrum.rayleigh(inhomogeneous, u, vectors)
    assert_allclose(t_v, vectors * lam[None, :], atol=1e-9 * np.max(np.abs(t_v)))
