from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ikchain import lax, spectrum, zeroes
from ikchain.errors import (
    ConvergenceError,
    DegenerateConfigurationError,
    DomainError,
    PairingError,
    PoleError,
    SamplingError,
)
from ikchain.lax import ModelParams, eps_from_chi
from ikchain.zeroes import ZeroSet

ENERGY_TOL = 1e-8


def _params_from_chis(chi_plus, chi_minus, n_sites=8, eta=0.35):
    return ModelParams(
        eta=eta, eps=eps_from_chi(chi_plus), eps_prime=eps_from_chi(chi_minus),
        sigma_l=0.6, sigma_r_bar=0.7, n_sites=n_sites,
    )


@pytest.fixture(scope="module")
def ground():
    """ED result and extracted ground-state zeroes of the default N = 2 chain"""
    params = ModelParams(eta=0.35, eps=2.0, eps_prime=0.3, sigma_l=0.6, sigma_r_bar=0.7, n_sites=2)
    result = spectrum.diagonalize(params)
    return params, result, zeroes.extract_zeroes(result.curve(0), params)


def test_canonical_zbar():
    assert zeroes.canonical_zbar(1 - 2j) == pytest.approx((np.pi - 2) - 1j)
    # real axis: the representative with |Re| <= pi/2 wins
    assert zeroes.canonical_zbar(-2.5j) == pytest.approx(np.pi - 2.5)
    assert zeroes.canonical_zbar(-0.5j) == pytest.approx(0.5)


@pytest.mark.parametrize("z", [0.3 - 0.2j, -1.1 + 2.9j, 0.7 + 5.0j])
def test_canonical_representative_is_equivalent(z):
    zbar = zeroes.canonical_zbar(z)
    assert zbar.imag <= 0
    assert -np.pi < zbar.real <= np.pi
    # Both representatives give the same factor pair sinh(u - 3 eta) - sinh z
    assert np.sinh(zeroes.canonical_z(z)) == pytest.approx(np.sinh(z))
    assert zeroes.zbar_distance(zbar, zeroes.mirror_zbar(zbar)) == pytest.approx(0.0, abs=1e-12)


def test_extract_ground_state(ground):
    params, result, zset = ground
    assert len(zset.zs) == 2 * params.n_sites + 2
    assert zset.reconstruction_error < 1e-8
    assert zeroes.energy_from_zeroes(zset) == pytest.approx(result.energies[0], abs=ENERGY_TOL)
    assert np.max(np.abs(zeroes.bae_residual(zset, params))) < 1e-8


def test_reconstruction_matches_curve(ground):
    params, result, zset = ground
    u = 0.21 + 0.47j
    assert zeroes.lambda_at(zset, u) == pytest.approx(spectrum.eigenvalues_at(result, u)[0], rel=1e-8)


def test_all_states_reproduce_spectrum(ground):
    params, result, _ = ground
    energies = [
        zeroes.energy_from_zeroes(zeroes.extract_zeroes(result.curve(state), params))
        for state in result.states
    ]
    assert_allclose(np.sort(energies), result.energies, atol=ENERGY_TOL)


def test_solve_bae_polishes_extracted_zeroes(ground):
    params, result, zset = ground
    solved = zeroes.solve_bae(zset, params)
    assert solved.trace[-1] < zeroes.BAE_TOL
    assert len(solved.trace) <= 4
    assert zeroes.energy_from_zeroes(solved) == pytest.approx(result.energies[0], abs=ENERGY_TOL)


def test_residual_is_sensitive(ground):
    params, _, zset = ground
    solved = zeroes.solve_bae(zset, params)
    zs = solved.zs.copy()
    zs[0] += 0.1
    base = np.max(np.abs(zeroes.bae_residual(solved, params)))
    perturbed = np.max(np.abs(zeroes.bae_residual(ZeroSet(zs, solved.lambda0, 2, params.eta), params)))
    assert perturbed > 1e4 * max(base, 1e-16)


def test_asymptotic_row_vanishes_at_exact_coefficient(params):
    seed = zeroes.seed_ground_state(params.replace(n_sites=4))
    rows = zeroes.bae_residual(seed, params.replace(n_sites=4))
    assert len(rows) == 2 * 4 + 3
    assert abs(rows[-1]) < 1e-14


def test_bae_residual_checks_chain_length(ground):
    params, _, zset = ground
    with pytest.raises(ValueError):
        zeroes.bae_residual(zset, params.replace(n_sites=3))


def test_ground_state_zeroes_small_chain(ground):
    params, result, _ = ground
    zset = zeroes.ground_state_zeroes(params)
    assert zeroes.energy_from_zeroes(zset) == pytest.approx(result.energies[0], abs=ENERGY_TOL)


def test_long_chain_ground_state_matches_exact_diagonalization(params):
    seven = params.replace(n_sites=7)
    zset = zeroes.ground_state_zeroes(seven)
    assert len(zset.zs) == 16
    assert np.max(np.abs(zeroes.bae_residual(zset, seven))) < 1e-10
    ed = spectrum.diagonalize(seven, states=[0])
    assert zeroes.energy_from_zeroes(zset) == pytest.approx(ed.energies[0], abs=1e-7)


def test_jacobian_matches_finite_differences(ground):
    params, _, zset = ground
    x = zeroes._pack(zeroes.solve_bae(zset, params))
    _, jac = zeroes._bae_system(x, params)
    step = 1e-6
    for j in range(len(x)):
        shift = np.zeros(len(x), dtype=complex)
        shift[j] = step
        up, _ = zeroes._bae_system(x + shift, params)
        down, _ = zeroes._bae_system(x - shift, params)
        assert_allclose((up - down) / (2 * step), jac[:, j], atol=1e-6 * np.max(np.abs(jac)))


def test_solve_bae_recovers_from_a_perturbed_seed(ground):
    params, result, zset = ground
    shifted = replace(zset, zs=zset.zs + 0.05 * np.exp(1j * np.arange(len(zset.zs))))
    solved = zeroes.solve_bae(shifted, params)
    assert np.all(np.isfinite(solved.trace))
    assert solved.trace[-1] < zeroes.BAE_TOL
    assert zeroes.energy_from_zeroes(solved) == pytest.approx(result.energies[0], abs=ENERGY_TOL)


def test_solve_bae_rejects_coincident_zeroes(ground):
    params, _, zset = ground
    zs = zset.zs.copy()
    zs[1] = zs[0]
    with pytest.raises(DegenerateConfigurationError, match="coincide"):
        zeroes.solve_bae(ZeroSet(zs, zset.lambda0, 2, params.eta), params)


def test_solve_bae_reports_the_best_iterate(ground):
    params, _, zset = ground
    with pytest.raises(ConvergenceError) as info:
        zeroes.solve_bae(replace(zset, zs=zset.zs + 0.3), params, maxiter=1)
    assert isinstance(info.value.best, ZeroSet)
    assert len(info.value.trace) == 2
    assert np.all(np.isfinite(info.value.trace))


def test_synthetic_recovery(params):
    zbars = [0.4 - 1.75j, -1.2 - 1.6j, np.pi / 2 - 0.7j, -np.pi / 2 - 0.7j, 2.5 - 2.2j, -0.3 - 0.9j]
    known = ZeroSet.from_zbar(zbars, 1.7 - 0.4j, params).canonical()
    grid = spectrum.default_u_grid(params)
    curve = [(u, zeroes.lambda_at(known, u)) for u in grid]
    found = zeroes.extract_zeroes(curve, params)
    assert found.lambda0 == pytest.approx(known.lambda0, rel=1e-8)
    assert_allclose(sorted(found.zbar, key=lambda z: z.real), sorted(known.zbar, key=lambda z: z.real), atol=1e-8)


def test_extract_needs_enough_samples(params):
    curve = [(u, 1.0) for u in spectrum.default_u_grid(params)[:8]]
    with pytest.raises(SamplingError):
        zeroes.extract_zeroes(curve, params)


def test_unpaired_roots(params, rng):
    centres = rng.uniform(-1, 1, 12) + 1j * rng.uniform(-np.pi, np.pi, 12)
    grid = spectrum.default_u_grid(params)
    curve = [(u, np.prod(np.sinh((u - centres) / 2))) for u in grid]
    with pytest.raises(PairingError, match="pairing violation") as info:
        zeroes.extract_zeroes(curve, params)
    assert len(info.value.unpaired) > 0


def test_pole_at_zero(params):
    zs = [-3 * params.eta, 0.1 - 1.0j, 0.2, 0.3, 0.4, 0.5]
    with pytest.raises(PoleError, match="pole at zero"):
        zeroes.energy_from_zeroes(ZeroSet(zs, 1.0, 2, params.eta))


def test_free_boundary_zeroes_give_a_real_energy():
    eta = 0.35
    zbars = np.array([np.pi / 2 - 2j * eta, -np.pi / 2 - 2j * eta])
    free = ZeroSet(-1j * zbars, 1.0, 0, eta)
    assert abs(zeroes.energy_from_zeroes(free, complex_value=True).imag) < 1e-14


def test_zero_count_is_validated(params):
    with pytest.raises(ValueError):
        ZeroSet(np.zeros(5), 1.0, 2, params.eta)


@pytest.mark.parametrize(
    "chis, regime",
    [
        ((2.03, 0.63), "II"),
        ((1.05, 1.05), "I"),
        ((2.0, 1.5), "I"),
        ((0.5, 2.0), "II"),
        ((0.1, 2.0), "III"),
        ((0.5, 0.6), "IV"),
        ((0.1, 0.6), "V"),
        ((0.1, 0.2), "VI"),
    ],
)
def test_regime_table(chis, regime):
    assert zeroes.regime_from_chis(*chis, 0.35) == regime
    assert zeroes.regime_from_chis(*reversed(chis), 0.35) == regime


def test_default_parameters_sit_in_regime_two(params):
    assert zeroes.regime_of(params) == "II"


@pytest.mark.parametrize("regime", zeroes.REGIMES)
def test_expected_counts_fill_the_chain(regime):
    n = 8
    counts = zeroes.expected_counts(regime, n)
    total = counts["bulk_pairs"] + counts["free_boundary_zeroes"] // 2 + counts["boundary_pairs"] + counts["extra_pairs"]
    assert total == 2 * n + 2


@pytest.mark.parametrize(
    "chis", [(2.0, 1.5), (2.0, 0.6), (2.0, 0.1), (0.5, 0.6), (0.1, 0.6), (0.1, 0.2)]
)
def test_seeded_patterns_classify_exactly(chis):
    params = _params_from_chis(*chis)
    seed = zeroes.seed_ground_state(params)
    assert len(seed.zs) == 2 * params.n_sites + 2

    report = zeroes.classify_pattern(seed, params)
    assert report.consistent
    assert report.counts == zeroes.expected_counts(report.regime, params.n_sites)
    assert report.unclassified == 0
    matched = [d for d, tag in zip(report.deviations, report.zset.tags) if tag in (zeroes.FREE, zeroes.BOUNDARY)]
    assert max(matched) < 1e-12


def test_regime_one_pattern():
    params = _params_from_chis(2.0, 1.5)
    report = zeroes.classify_pattern(zeroes.seed_ground_state(params), params)
    assert report.regime == "I"
    assert report.counts == {"bulk_pairs": 14, "free_boundary_zeroes": 4, "boundary_pairs": 0, "extra_pairs": 2}
    alpha, beta = report.extra_params
    assert alpha == pytest.approx(zeroes.EXTRA_ALPHA)
    assert beta == pytest.approx(zeroes.EXTRA_BETA * params.eta)


def test_regime_six_pattern():
    params = _params_from_chis(0.1, 0.2)
    report = zeroes.classify_pattern(zeroes.seed_ground_state(params), params)
    assert report.regime == "VI"
    assert report.boundary_pairs == 4
    assert report.extra_pairs == 0
    assert report.extra_params is None


def test_misplaced_zero_stays_unclassified():
    params = _params_from_chis(2.0, 1.5)
    seed = zeroes.seed_ground_state(params)
    zbars = seed.zbar.copy()
    zbars[0] = 0.1 - 0.3j
    report = zeroes.classify_pattern(ZeroSet.from_zbar(zbars, seed.lambda0, params), params)
    assert not report.consistent
    assert report.unclassified == 1
    assert len(report.zset.zs) == len(seed.zs)


def test_upscale_keeps_non_bulk_zeroes():
    small = _params_from_chis(2.0, 1.5)
    seed = zeroes.classify_pattern(zeroes.seed_ground_state(small), small).zset
    large = small.replace(n_sites=12)
    grown = zeroes.upscale_zeroes(seed, large)
    assert len(grown.zs) == 26
    assert grown.tags.count(zeroes.BULK) == 22
    assert grown.tags.count(zeroes.EXTRA) == 2
    assert grown.lambda0 == pytest.approx(lax.asymptotic_coefficient(large) / (0.25j) ** 26)


def test_seed_needs_enough_sites():
    with pytest.raises(ValueError):
        zeroes.seed_ground_state(_params_from_chis(0.1, 0.2, n_sites=1))


def test_excitation_needs_small_chi(params):
    eight = params.replace(n_sites=8)
    seed = zeroes.seed_ground_state(eight)
    with pytest.raises(DomainError, match="no boundary excitation"):
        zeroes.seed_boundary_excitation(seed, eight, "+")


def test_excitation_seed_moves_the_boundary_pair(params):
    eight = params.replace(n_sites=8)
    ground = zeroes.classify_pattern(zeroes.seed_ground_state(eight), eight).zset
    excited = zeroes.seed_boundary_excitation(ground, eight, "-")
    eta, chi = eight.eta, eight.chi_minus
    zbar = excited.zbar
    assert min(zeroes.zbar_distance(z, np.pi - 1j * (4 * eta - chi)) for z in zbar) < 1e-12
    assert min(zeroes.zbar_distance(z, -1j * (2 * eta - chi)) for z in zbar) < 1e-12
    assert excited.tags.count(zeroes.EXTRA) == ground.tags.count(zeroes.EXTRA) + 2
    assert len(excited.zs) == 18


REGIME_CHIS = [(2.0, 1.5), (2.0, 0.6), (2.0, 0.1), (0.5, 0.6), (0.1, 0.6), (0.1, 0.2)]


@pytest.mark.parametrize("chis", REGIME_CHIS)
def test_ground_state_patterns_at_eight_sites(chis):
    params = _params_from_chis(*chis)
    zset = zeroes.ground_state_zeroes(params)
    assert np.max(np.abs(zeroes.bae_residual(zset, params))) < 1e-10

    report = zeroes.classify_pattern(zset, params)
    assert report.regime == zeroes.regime_of(params)
    assert report.consistent
    assert report.counts == zeroes.expected_counts(report.regime, 8)


def test_seeded_solve_converges_to_the_regime_one_pattern():
    params = _params_from_chis(2.0, 1.5)
    solved = zeroes.solve_bae(zeroes.seed_ground_state(params), params)
    assert solved.trace[-1] < zeroes.BAE_TOL
    report = zeroes.classify_pattern(solved, params)
    assert report.regime == "I"
    assert report.consistent


@pytest.mark.parametrize("chis", [(2.0, 1.5), (0.1, 0.2)])
def test_pattern_is_stable_in_chain_length(chis):
    counts = {}
    for n in (8, 16):
        params = _params_from_chis(*chis, n_sites=n)
        report = zeroes.classify_pattern(zeroes.ground_state_zeroes(params), params)
        assert report.consistent
        counts[n] = report.counts
    assert counts[8]["free_boundary_zeroes"] == counts[16]["free_boundary_zeroes"]
    assert counts[8]["boundary_pairs"] == counts[16]["boundary_pairs"]
    assert counts[8]["extra_pairs"] == counts[16]["extra_pairs"]
    assert counts[16]["bulk_pairs"] - counts[8]["bulk_pairs"] == 16


@pytest.fixture(scope="module")
def inhomogeneous():
    params = ModelParams(
        eta=0.35, eps=2.0, eps_prime=0.3, sigma_l=0.6, sigma_r_bar=0.7, n_sites=2, thetas=(0.13, -0.21)
    )
    result = spectrum.diagonalize(params)
    return params, result, zeroes.extract_zeroes(result.curve(0), params)


def test_inhomogeneous_residual_of_exact_zeroes(inhomogeneous):
    params, _, zset = inhomogeneous
    assert zset.reconstruction_error < 1e-8
    assert np.max(np.abs(zeroes.bae_residual(zset, params))) < 1e-8


def test_inhomogeneous_energy_from_zeroes(inhomogeneous):
    _, result, zset = inhomogeneous
    expected = result.energies[0] + 1j * result.imaginary_parts[0]
    assert zeroes.energy_from_zeroes(zset, complex_value=True) == pytest.approx(expected, abs=1e-6)


def test_inhomogeneous_solve_returns_to_exact_zeroes(inhomogeneous):
    params, result, zset = inhomogeneous
    solved = zeroes.solve_bae(replace(zset, zs=zset.zs + 0.01), params)
    assert solved.trace[-1] < zeroes.BAE_TOL
    expected = result.energies[0] + 1j * result.imaginary_parts[0]
    assert zeroes.energy_from_zeroes(solved, complex_value=True) == pytest.approx(expected, abs=1e-6)
