"""Zeroes of transfer-matrix eigenvalues and the homogeneous Bethe ansatz equations

An open-chain eigenvalue is

    Lambda(u) = Lambda0 prod_j sinh((u - z_j - 3 eta)/2) sinh((u + z_j - 3 eta + i pi)/2)

over 2N+2 zeroes z_j. Each factor pair equals (i/2)(sinh(u - 3 eta) - sinh z_j),
so z_j is only defined up to z -> i pi - z and z -> z + 2 pi i. Reports use
z_bar = i z in a canonical representative: Im z_bar <= 0, Re z_bar in (-pi, pi].

The Bethe ansatz equations are solved for sigma_j = sinh z_j, which carries no
such ambiguity, with every relation written as log(lhs / rhs).
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import lstsq
from scipy.optimize import linear_sum_assignment

from . import lax, spectrum
from .errors import (
    ConvergenceError,
    DegenerateConfigurationError,
    DomainError,
    PairingError,
    PoleError,
    SamplingError,
)
from .timer import Timer
from .trigpoly import (
    HyperbolicFactor,
    HyperbolicProduct,
    fit_from_samples,
    line_weights,
    roots,
    taylor_log,
    taylor_reciprocal,
)

log = logging.getLogger(__name__)

BULK = "bulk_pair"
FREE = "free_boundary"
BOUNDARY = "boundary_pair"
EXTRA = "extra_pair"
UNCLASSIFIED = "unclassified"

REGIMES = ("I", "II", "III", "IV", "V", "VI")

BAE_TOL = 1e-11
RECONSTRUCTION_TOL = 1e-8
PAIRING_TOL = 1e-6
MAX_STEP = 0.5  # largest relative change of an unknown per solver step
INITIAL_DAMPING = 1e-6
MIN_DAMPING = 1e-20
MAX_DAMPING = 1e10
ED_LIMIT = 6  # largest N solved directly by exact diagonalization in ground_state_zeroes

EXTRA_BETA = 6.0  # extra-pair seed depth in units of eta
EXTRA_ALPHA = 0.25


def _wrap(x):
    """Reduces a real number into (-pi, pi]"""
    return x - 2 * np.pi * np.ceil((x - np.pi) / (2 * np.pi))


def mirror_zbar(zbar):
    """The equivalent representative of z_bar under z -> i pi - z"""
    m = -np.pi - zbar
    return _wrap(m.real) + 1j * m.imag


def canonical_zbar(z, tol=1e-12):
    """Canonical z_bar = i z: Im z_bar <= 0, Re z_bar wrapped into (-pi, pi]

    On the real axis, where both representatives qualify, the one with real part
    in [-pi/2, pi/2] is taken.
    """
    zbar = 1j * complex(z)
    zbar = _wrap(zbar.real) + 1j * zbar.imag
    mirrored = mirror_zbar(zbar)
    if abs(zbar.imag) <= tol:
        chosen = zbar if abs(zbar.real) <= np.pi / 2 else mirrored
        return complex(chosen.real, 0.0)
    return zbar if zbar.imag < 0 else mirrored


def canonical_z(z, tol=1e-12):
    return -1j * canonical_zbar(z, tol)


def zbar_distance(a, b):
    """Distance between two zero classes given by z_bar representatives"""
    def gap(x, y):
        d = x - y
        return abs(_wrap(d.real) + 1j * d.imag)

    return min(gap(a, b), gap(a, mirror_zbar(b)))


@dataclass(frozen=True, eq=False)
class ZeroSet:
    """Zeroes z_j and coefficient Lambda0 of one eigenvalue

    ``boundary_kind`` is 'open' (2N+2 zeroes, paired factors) or 'periodic' (2N
    zeroes, single factors). ``pairs`` keeps the two roots in u each open-chain
    zero was built from. ``trace`` is the max residual per solver iteration.
    """

    zs: np.ndarray
    lambda0: complex
    n_sites: int
    eta: float
    tags: tuple = ()
    pairs: tuple = ()
    boundary_kind: str = spectrum.OPEN
    trace: tuple = ()
    reconstruction_error: float = field(default=None)

    def __post_init__(self):
        zs = np.asarray(self.zs, dtype=complex)
        object.__setattr__(self, "zs", zs)
        expected = 2 * self.n_sites + 2 if self.boundary_kind == spectrum.OPEN else 2 * self.n_sites
        if len(zs) != expected:
            raise ValueError(f"Expected {expected} zeroes for N = {self.n_sites}, got {len(zs)}")
        if not self.tags:
            object.__setattr__(self, "tags", (UNCLASSIFIED,) * len(zs))
        elif len(self.tags) != len(zs):
            raise ValueError(f"Got {len(self.tags)} tags for {len(zs)} zeroes")

    def __repr__(self):
        return f"<ZeroSet {self.boundary_kind} N={self.n_sites} {len(self.zs)} zeroes, lambda0={self.lambda0:.6g}>"

    @classmethod
    def from_zbar(cls, zbars, lambda0, params, tags=()):
        zs = -1j * np.asarray(zbars, dtype=complex)
        return cls(zs, complex(lambda0), params.n_sites, params.eta, tuple(tags))

    @property
    def zbar(self) -> np.ndarray:
        """Canonical z_bar of every zero (open chains)"""
        return np.array([canonical_zbar(z) for z in self.zs])

    def canonical(self):
        """The same eigenvalue with every zero in its canonical representative"""
        if self.boundary_kind != spectrum.OPEN:
            return self
        return replace(self, zs=np.array([canonical_z(z) for z in self.zs]))

    def with_tags(self, tags):
        return replace(self, tags=tuple(tags))

    def product(self):
        """Lambda(u) as a HyperbolicProduct"""
        shift = 3 * self.eta
        if self.boundary_kind == spectrum.PERIODIC:
            factors = [HyperbolicFactor(0.5, -(z + shift) / 2) for z in self.zs]
        else:
            factors = []
            for z in self.zs:
                factors.append(HyperbolicFactor(0.5, -(z + shift) / 2))
                factors.append(HyperbolicFactor(0.5, (z - shift + 1j * np.pi) / 2))
        return HyperbolicProduct(factors, self.lambda0)

    def plot_points(self):
        """(Re z_bar, Im z_bar, tag) for each zero and its mirror image"""
        rows = []
        for zb, tag in zip(self.zbar, self.tags):
            for point in (zb, mirror_zbar(zb)):
                rows.append((float(point.real), float(point.imag), tag))
        return sorted(rows, key=lambda r: (r[1], r[0]))

    def to_dict(self) -> dict:
        return {
            "boundary_kind": self.boundary_kind,
            "n_sites": self.n_sites,
            "lambda0": [float(self.lambda0.real), float(self.lambda0.imag)],
            "zbar": [[float(z.real), float(z.imag)] for z in (self.zbar if self.boundary_kind == spectrum.OPEN else 1j * self.zs)],
            "tags": list(self.tags),
            "trace": [float(r) for r in self.trace],
        }


def lambda_at(zset, u):
    """Evaluates the eigenvalue rebuilt from its zeroes"""
    return zset.product()(u)


def _curve_arrays(curve):
    us = np.array([complex(u) for u, _ in curve])
    ys = np.array([complex(y) for _, y in curve])
    return us, ys


def _pair_roots(us, eta):
    """Greedily pairs roots with a + b = 6 eta + i pi modulo 2 pi i"""
    target = 6 * eta + 1j * np.pi
    n = len(us)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            d = us[i] + us[j] - target
            im = _wrap(d.imag)
            edges.append((abs(complex(d.real, im)), i, j))
    edges.sort()

    used = set()
    pairs = []
    for cost, i, j in edges:
        if i in used or j in used:
            continue
        if cost > PAIRING_TOL * (1 + abs(us[i]) + abs(us[j])):
            break
        used.update((i, j))
        pairs.append((us[i], us[j]))

    if len(pairs) * 2 != n:
        leftover = [us[i] for i in range(n) if i not in used]
        raise PairingError(
            f"pairing violation: {len(leftover)} of {n} roots have no partner at 6η+iπ - u",
            unpaired=leftover,
        )
    return pairs


def _reconstruction_error(zset, us, ys, weights):
    rebuilt = lambda_at(zset, us)
    return float(np.max(np.abs(rebuilt - ys) * weights))


def extract_zeroes(curve, params):
    """Zeroes and coefficient of an open-chain eigenvalue from its samples

    Args:
        curve (list): (u, Lambda(u)) samples, at least 4N+6 of them
        params (ModelParams): Supplies N and eta

    Returns:
        ZeroSet: in canonical representatives, with reconstruction_error set

    Raises:
        SamplingError: If the samples cannot determine the polynomial
        PairingError: If the roots do not pair up
    """
    n, eta = params.n_sites, params.eta
    us, ys = _curve_arrays(curve)
    if len(us) < 4 * n + 6:
        raise SamplingError(f"degenerate sampling: {len(us)} samples, need at least {4 * n + 6}")

    weights = line_weights(us, ys, center=3 * eta)
    degree = 4 * n + 4
    poly = fit_from_samples(
        list(zip(us, ys)), -degree, degree, step=2, center=3 * eta, trim=False, weights=weights
    )
    found = roots(poly)
    if len(found) != degree:
        raise PairingError(f"pairing violation: expected {degree} roots, found {len(found)}", unpaired=found)

    pairs = _pair_roots(found, eta)
    zs = np.array([a - 3 * eta for a, _ in pairs])
    lambda0 = poly.leading() / (0.25j) ** (2 * n + 2)
    zset = ZeroSet(zs, lambda0, n, eta, pairs=tuple(pairs)).canonical()

    error = _reconstruction_error(zset, us, ys, weights)
    if error > RECONSTRUCTION_TOL:
        log.warning("zero reconstruction error %.2e above %.0e", error, RECONSTRUCTION_TOL)
    return replace(zset, reconstruction_error=error)


def extract_periodic_zeroes(curve, params):
    """Zeroes of a periodic-chain eigenvalue Lambda0 prod_j sinh((u - z_j - 3 eta)/2)"""
    n, eta = params.n_sites, params.eta
    us, ys = _curve_arrays(curve)
    if len(us) < 2 * n + 2:
        raise SamplingError(f"degenerate sampling: {len(us)} samples, need at least {2 * n + 2}")

    weights = line_weights(us, ys, center=3 * eta)
    poly = fit_from_samples(
        list(zip(us, ys)), -2 * n, 2 * n, step=2, center=3 * eta, trim=False, weights=weights
    )
    found = roots(poly)
    if len(found) != 2 * n:
        raise PairingError(f"expected {2 * n} roots, found {len(found)}", unpaired=found)

    zs = found - 3 * eta
    lambda0 = poly.leading() / np.prod(np.exp(-zs / 2) / 2)
    zset = ZeroSet(zs, lambda0, n, eta, boundary_kind=spectrum.PERIODIC)
    return replace(zset, reconstruction_error=_reconstruction_error(zset, us, ys, weights))


def energy_from_zeroes(zset, complex_value=False):
    """E = (1/2) sum_j [coth((z_j + 3 eta)/2) - tanh((z_j - 3 eta)/2)]

    Evaluated as sum_j cosh(3 eta) / (sinh(3 eta) + sinh z_j), which does not
    depend on the representative of each zero.

    Raises:
        PoleError: If a zero sits at -3 eta
    """
    eta = zset.eta
    s = np.sinh(zset.zs)
    denominators = np.sinh(3 * eta) + s
    bad = np.abs(denominators) < 1e-14 * (np.abs(s) + np.sinh(3 * eta))
    if np.any(bad):
        raise PoleError(f"pole at zero: z = {zset.zs[bad][0]} sits at -3η")
    energy = complex(np.sum(np.cosh(3 * eta) / denominators))
    if complex_value:
        return energy
    if abs(energy.imag) > 1e-8:
        log.warning("energy from zeroes has imaginary part %.2e", energy.imag)
    return energy.real


def periodic_energy_from_zeroes(zset, complex_value=False):
    """E^p = sum_j coth((z_j + 3 eta)/2)"""
    args = (zset.zs + 3 * zset.eta) / 2
    if np.any(np.abs(np.sinh(args)) < 1e-14):
        raise PoleError("pole at zero: a periodic zero sits at -3η")
    energy = complex(np.sum(1 / np.tanh(args)))
    return energy if complex_value else energy.real


def _theta_clusters(params, tol=1e-12):
    """Distinct inhomogeneities with their multiplicities"""
    clusters = []
    for t in params.theta:
        for c in clusters:
            if abs(c[0] - t) < tol:
                c[1] += 1
                break
        else:
            clusters.append([t, 1])
    return [(complex(t), m) for t, m in clusters]


def _log_relation(x, eta, lam_terms, fixed_terms, t, order):
    """Taylor series of log(lhs / rhs) of one eigenvalue relation about u = t

    ``lam_terms`` lists (shift, sign) for each Lambda(u + shift) and
    ``fixed_terms`` lists (product, sign) for the scalar functions.

    Returns:
        (series, magnitude, jacobian): the series, the coefficient-wise sum of
        |log factor| terms and the derivative of the series in x
    """
    sigma, n = x[:-1], len(x) - 1
    series = np.zeros(order + 1, dtype=complex)
    magnitude = np.zeros(order + 1)
    jac = np.zeros((order + 1, n + 1), dtype=complex)
    for shift, sign in lam_terms:
        diffs = np.tile(HyperbolicFactor(1.0, shift - 3 * eta).series(t, order), (n, 1))
        diffs[:, 0] -= sigma
        logs = taylor_log(diffs)
        series += sign * logs.sum(axis=0)
        series[0] += sign * (x[-1] + n * np.log(0.5j))
        magnitude += np.abs(logs).sum(axis=0)
        jac[:, :-1] -= sign * taylor_reciprocal(diffs).T
        jac[0, -1] += sign
    for product, sign in fixed_terms:
        logs, sizes = product.log_series(t, order)
        series += sign * logs
        magnitude += sizes
    return series, magnitude, jac


def _relation_terms(params):
    """(lam_terms, fixed_terms) of the crossing and fusion relations"""
    eta = params.eta
    fns = lax.scalar_functions(params)
    crossing = (
        [(0.0, 1), (6 * eta + 1j * np.pi, 1)],
        [(fns.phi1.substituted(2.0, 0.0), 1), (fns.delta1, -1)],
    )
    fusion = (
        [(0.0, 1), (4 * eta, 1), (2 * eta + 1j * np.pi, -1)],
        [(fns.phi2.substituted(-2.0, 8 * eta), 1), (fns.delta2, -1)],
    )
    return crossing, fusion


def _closure_row(x, point, target, eta):
    """1 - target / Lambda(point) and its derivative in x"""
    sigma, n = x[:-1], len(x) - 1
    gaps = np.sinh(point - 3 * eta) - sigma
    log_lambda = x[-1] + n * np.log(0.5j) + np.sum(np.log(gaps))
    ratio = target * np.exp(-log_lambda)
    return 1.0 - ratio, ratio * np.append(-1.0 / gaps, 1.0)


def _bae_system(x, params):
    """Residual rows of the Bethe ansatz equations and their Jacobian in x

    x holds sigma_j = sinh z_j followed by log Lambda0. Rows from Taylor
    coefficients of order k >= 1 are log(lhs / rhs) coefficients divided by the
    summed size of the log terms; order-0 rows are 1 - rhs / lhs.
    """
    eta, n = params.eta, params.n_sites
    clusters = _theta_clusters(params)
    crossing, fusion = _relation_terms(params)

    rows, jacs = [], []

    def add(series, magnitude, jac, keep):
        for k in keep:
            if k == 0:
                ratio = np.exp(-series[0])
                rows.append(1.0 - ratio)
                jacs.append(ratio * jac[0])
            else:
                size = max(magnitude[k], 1e-300)
                rows.append(series[k] / size)
                jacs.append(jac[k] / size)

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for t, m in clusters:
            if abs(t) < 1e-12:
                # The crossing relation is even about 0 and its constant term
                # follows from the Lambda(0) row
                add(*_log_relation(x, eta, *crossing, t, 2 * m), [2 * k for k in range(1, m + 1)])
            else:
                add(*_log_relation(x, eta, *crossing, t, m - 1), range(m))
        for t, m in clusters:
            add(*_log_relation(x, eta, *fusion, t, m - 1), range(m))

        for point, target in ((0.0, lax.lambda_at_zero(params)), (1j * np.pi, lax.lambda_at_i_pi(params))):
            row, jac = _closure_row(x, point, target, eta)
            rows.append(row)
            jacs.append(jac)

        ratio = lax.asymptotic_coefficient(params) / (np.exp(x[-1]) * (0.25j) ** (2 * n + 2))
        rows.append(1.0 - ratio)
        jacs.append(np.append(np.zeros(len(x) - 1), ratio))

    rows = np.array(rows, dtype=complex)
    rows[~np.isfinite(rows)] = np.inf
    return rows, np.array(jacs, dtype=complex)


def _pack(zset):
    return np.append(np.sinh(np.asarray(zset.zs, dtype=complex)), np.log(complex(zset.lambda0)))


def _unpack(x, template):
    return replace(template, zs=np.arcsinh(x[:-1]), lambda0=complex(np.exp(x[-1])), pairs=())


def bae_residual(zset, params):
    """Residuals of the homogeneous Bethe ansatz equations in log form

    Rows 1..N come from the crossing product relation at each theta_j, rows
    N+1..2N from the fusion relation, and the last three fix Lambda(0),
    Lambda(i pi) and the asymptotic coefficient. Coincident inhomogeneities
    (the homogeneous chain included) contribute Taylor coefficients of
    log(lhs / rhs) instead of repeated point values. A constant term enters as
    1 - rhs / lhs, a higher coefficient divided by the summed size of the log
    terms, so no row depends on a branch of the logarithm.

    Returns:
        numpy array of 2N+3 complex residuals; rows hit by a pole are inf
    """
    if zset.n_sites != params.n_sites:
        raise ValueError(f"ZeroSet has N = {zset.n_sites} but params have N = {params.n_sites}")
    rows, _ = _bae_system(_pack(zset), params)
    return rows


def _limit_step(x, dx):
    """Scales dx so no sigma_j moves by more than MAX_STEP (1 + |sigma_j|)"""
    reach = max(float(np.max(np.abs(dx[:-1]) / (1 + np.abs(x[:-1])))), abs(dx[-1])) / MAX_STEP
    return dx / reach if reach > 1 else dx


def _check_seed(x, seed):
    sigma = x[:-1]
    if not np.all(np.isfinite(x)):
        raise DegenerateConfigurationError("degenerate configuration: non-finite seed", best=seed)
    gaps = np.abs(sigma[:, None] - sigma[None, :])
    np.fill_diagonal(gaps, np.inf)
    close = gaps <= 1e-10 * (1 + np.abs(sigma)[:, None])
    if np.any(close):
        i, j = np.argwhere(close)[0]
        raise DegenerateConfigurationError(
            f"degenerate configuration: zeroes {i} and {j} coincide up to z -> i pi - z", best=seed
        )


def solve_bae(seed, params, tol=BAE_TOL, maxiter=100):
    """Levenberg-Marquardt iteration on the 2N+3 unknowns (sinh z_j, log Lambda0)

    A trial step is accepted only when it is finite and lowers the 2-norm of the
    residual; otherwise the damping grows and the step is recomputed. Steps are
    capped by MAX_STEP relative to the unknowns.

    Args:
        seed (ZeroSet): Starting point
        params (ModelParams): Model parameters
        tol (float): Target for max |residual|
        maxiter (int): Iteration limit

    Returns:
        ZeroSet: canonical, with ``trace`` holding the max residual per iteration

    Raises:
        DegenerateConfigurationError: If the seed has coincident zeroes or the
            Jacobian has a vanishing or non-finite column
        ConvergenceError: If maxiter is reached or the damping runs away;
            carries the best iterate
    """
    if seed.n_sites != params.n_sites:
        raise ValueError(f"ZeroSet has N = {seed.n_sites} but params have N = {params.n_sites}")
    x = _pack(seed)
    _check_seed(x, seed)
    rows, jac = _bae_system(x, params)
    cost = float(np.linalg.norm(rows))
    if not np.isfinite(cost):
        raise DegenerateConfigurationError("degenerate configuration: the seed hits a pole", best=seed)
    trace = [float(np.max(np.abs(rows)))]
    damping = INITIAL_DAMPING

    def fail(message, error=ConvergenceError):
        return error(message, best=_unpack(x, seed).canonical(), trace=trace)

    with Timer("solve_bae") as timer:
        for iteration in range(maxiter):
            if trace[-1] < tol:
                break
            columns = np.linalg.norm(jac, axis=0)
            if not np.all(np.isfinite(columns)) or np.any(columns == 0):
                raise fail(f"degenerate configuration at iteration {iteration}: singular Jacobian column",
                           DegenerateConfigurationError)

            while True:
                lhs = np.vstack([jac, np.sqrt(damping) * np.diag(columns)])
                rhs = np.concatenate([-rows, np.zeros(len(x), dtype=complex)])
                dx = _limit_step(x, lstsq(lhs, rhs)[0])
                trial = x + dx
                trial_rows, trial_jac = _bae_system(trial, params)
                trial_cost = float(np.linalg.norm(trial_rows))
                if np.isfinite(trial_cost) and trial_cost < cost:
                    damping = max(damping / 10, MIN_DAMPING)
                    break
                damping *= 4
                if damping > MAX_DAMPING:
                    raise fail(f"solve_bae stalled at residual {trace[-1]:.3e} after {iteration} iterations")

            x, rows, jac, cost = trial, trial_rows, trial_jac, trial_cost
            trace.append(float(np.max(np.abs(rows))))
            log.debug("lm %d: residual %.3e (damping %.1e)", iteration + 1, trace[-1], damping)

    if trace[-1] >= tol:
        raise fail(f"solve_bae stopped at residual {trace[-1]:.3e} after {maxiter} iterations")
    log.info("BAE solved for N=%d in %d iterations (%.3fs)", params.n_sites, len(trace) - 1, timer.time)
    return replace(_unpack(x, seed), trace=tuple(trace)).canonical()


def regime_from_chis(chi_plus, chi_minus, eta, tol=1e-12):
    """Regime label from the two boundary parameters; boundaries are inclusive from above"""

    def band(chi):
        if chi >= 3 * eta - tol:
            return 2
        if chi >= eta - tol:
            return 1
        return 0

    table = {(2, 2): "I", (1, 2): "II", (0, 2): "III", (1, 1): "IV", (0, 1): "V", (0, 0): "VI"}
    return table[tuple(sorted((band(chi_plus), band(chi_minus))))]


def regime_of(params):
    return regime_from_chis(params.chi_plus, params.chi_minus, params.eta)


def expected_counts(regime, n_sites):
    """Ground-state pattern counts: bulk pairs, free points, boundary pairs, extra pairs"""
    bulk_offset, boundary, extra = {
        "I": (2, 0, 2),
        "II": (2, 1, 1),
        "III": (4, 2, 2),
        "IV": (4, 2, 2),
        "V": (4, 3, 1),
        "VI": (4, 4, 0),
    }[regime]
    return {
        "bulk_pairs": 2 * n_sites - bulk_offset,
        "free_boundary_zeroes": 4,
        "boundary_pairs": boundary,
        "extra_pairs": extra,
    }


def _free_targets(eta):
    return [np.pi / 2 - 2j * eta, -np.pi / 2 - 2j * eta]


def _boundary_targets(params, regime):
    """(label, z_bar) of the boundary pairs expected in a regime"""
    eta = params.eta

    def b2(chi):
        return np.pi - 1j * (2 * eta + chi)

    def b4(chi):
        return -1j * (4 * eta + chi)

    chi1, plus, minus = params.chi_min, params.chi_plus, params.chi_minus
    return {
        "I": [],
        "II": [("2eta+chi1", b2(chi1))],
        "III": [("2eta+chi1", b2(chi1)), ("4eta+chi1", b4(chi1))],
        "IV": [("2eta+chi+", b2(plus)), ("2eta+chi-", b2(minus))],
        "V": [("2eta+chi+", b2(plus)), ("2eta+chi-", b2(minus)), ("4eta+chi1", b4(chi1))],
        "VI": [("2eta+chi+", b2(plus)), ("2eta+chi-", b2(minus)), ("4eta+chi+", b4(plus)), ("4eta+chi-", b4(minus))],
    }[regime]


def _extra_seeds(regime, eta, alpha=EXTRA_ALPHA, beta=None):
    beta = EXTRA_BETA * eta if beta is None else beta
    return {
        "I": [np.pi - alpha - 1j * beta, -(np.pi - alpha) - 1j * beta],
        "II": [np.pi - 1j * beta],
        "III": [np.pi - 1j * beta, -1j * beta],
        "IV": [alpha - 1j * beta, -alpha - 1j * beta],
        "V": [-1j * beta],
        "VI": [],
    }[regime]


def _bulk_seeds(count, eta):
    z_tilde = -np.pi + 2 * np.pi * (np.arange(count) + 0.5) / max(count, 1)
    return list(z_tilde - 5j * eta)


def _asymptotic_lambda0(params):
    return lax.asymptotic_coefficient(params) / (0.25j) ** (2 * params.n_sites + 2)


def seed_ground_state(params, n_sites=None):
    """The idealized ground-state pattern of the regime of params

    Bulk pairs sit on z_bar = z_tilde - 5i eta with z_tilde uniform in
    (-pi, pi), the free boundary zeroes at +-pi/2 - 2i eta, boundary pairs at
    their ideal locations and extra pairs at depth 6 eta.

    Raises:
        ValueError: If N is too small to hold the pattern
    """
    if n_sites is not None and n_sites != params.n_sites:
        params = params.replace(n_sites=n_sites)
    regime = regime_of(params)
    counts = expected_counts(regime, params.n_sites)
    if counts["bulk_pairs"] < 0:
        raise ValueError(f"The regime {regime} pattern needs more than N = {params.n_sites} sites")

    eta = params.eta
    zbars, tags = [], []
    for group, tag in (
        (_bulk_seeds(counts["bulk_pairs"], eta), BULK),
        (_free_targets(eta), FREE),
        ([zb for _, zb in _boundary_targets(params, regime)], BOUNDARY),
        (_extra_seeds(regime, eta), EXTRA),
    ):
        zbars.extend(group)
        tags.extend([tag] * len(group))
    return ZeroSet.from_zbar(zbars, _asymptotic_lambda0(params), params, tags)


def upscale_zeroes(zset, params):
    """Seeds a longer chain from a solved shorter one

    Non-bulk zeroes are kept; the bulk z_bar values are resampled at the new
    count by interpolating their quantiles, and Lambda0 is reset to the
    asymptotic value of the new size.
    """
    if UNCLASSIFIED in zset.tags or not zset.tags:
        zset = classify_pattern(zset, params.replace(n_sites=zset.n_sites)).zset
    zbar = zset.zbar
    bulk = np.array(sorted((zb for zb, tag in zip(zbar, zset.tags) if tag == BULK), key=lambda z: z.real))
    others = [(zb, tag) for zb, tag in zip(zbar, zset.tags) if tag != BULK]

    new_count = 2 * params.n_sites + 2 - len(others)
    if new_count < 0:
        raise ValueError(f"Cannot fit {len(others)} non-bulk zeroes into N = {params.n_sites}")
    if len(bulk):
        quantiles = (np.arange(len(bulk)) + 0.5) / len(bulk)
        ends_re = np.concatenate([[-np.pi], bulk.real, [np.pi]])
        ends_im = np.concatenate([[bulk.imag[0]], bulk.imag, [bulk.imag[-1]]])
        grid = np.concatenate([[0.0], quantiles, [1.0]])
        targets = (np.arange(new_count) + 0.5) / max(new_count, 1)
        new_bulk = list(np.interp(targets, grid, ends_re) + 1j * np.interp(targets, grid, ends_im))
    else:
        new_bulk = _bulk_seeds(new_count, params.eta)

    zbars = new_bulk + [zb for zb, _ in others]
    tags = [BULK] * len(new_bulk) + [tag for _, tag in others]
    return ZeroSet.from_zbar(zbars, _asymptotic_lambda0(params), params, tags)


def _ed_zeroes(params, state=0, cap=spectrum.SIZE_CAP):
    result = spectrum.diagonalize(params, states=[state], cap=cap)
    return extract_zeroes(result.curve(state), params)


def ground_state_zeroes(params, step_ratio=1.5, tol=BAE_TOL):
    """Solved ground-state zeroes, by exact diagonalization or continuation in N

    Chains with N <= ED_LIMIT are diagonalized directly. Longer homogeneous
    chains first try the idealized pattern of seed_ground_state; if that fails
    or leaves the pattern, they start from the ED_LIMIT ground state and grow by
    factors of at most step_ratio, each size seeded by upscale_zeroes and
    polished by solve_bae. A failed step is retried one site at a time.
    """
    target = params.n_sites
    if target <= ED_LIMIT:
        return solve_bae(_ed_zeroes(params), params, tol)
    if not params.homogeneous:
        raise ValueError("Continuation in N is only available for the homogeneous chain")

    try:
        report = classify_pattern(solve_bae(seed_ground_state(params), params, tol), params)
        if report.consistent:
            return report.zset
        log.info("seeded ground state left the regime %s pattern, continuing from N=%d", report.regime, ED_LIMIT)
    except (ConvergenceError, ValueError) as error:
        log.info("seeded ground state failed (%s), continuing from N=%d", error, ED_LIMIT)

    current = params.replace(n_sites=ED_LIMIT)
    zset = classify_pattern(solve_bae(_ed_zeroes(current), current, tol), current).zset
    while current.n_sites < target:
        n_next = min(target, max(current.n_sites + 1, int(np.ceil(current.n_sites * step_ratio))))
        following = params.replace(n_sites=n_next)
        try:
            solved = solve_bae(upscale_zeroes(zset, following), following, tol)
        except ConvergenceError:
            if n_next == current.n_sites + 1:
                raise
            log.info("continuation to N=%d failed, stepping by one site", n_next)
            following = params.replace(n_sites=current.n_sites + 1)
            solved = solve_bae(upscale_zeroes(zset, following), following, tol)
        zset = classify_pattern(solved, following).zset
        current = following
        log.info("continued ground state to N=%d", current.n_sites)
    return zset


def seed_boundary_excitation(ground, params, channel):
    """Seeds the boundary excitation of one boundary from a solved ground state

    The outer boundary pair of the channel moves from 2 eta + chi to 4 eta - chi,
    its inner pair (or the bulk zero nearest z_tilde = 0) moves to
    -i(2 eta - chi), and the two outermost bulk zeroes form an extra quadruple.

    Args:
        ground (ZeroSet): Solved ground state
        params (ModelParams): Model parameters
        channel (str): '+' for chi_plus, '-' for chi_minus

    Raises:
        DomainError: If chi >= 3 eta in the channel
    """
    if channel not in ("+", "-"):
        raise ValueError(f"channel must be '+' or '-', not '{channel}'")
    eta = params.eta
    chi = params.chi_plus if channel == "+" else params.chi_minus
    if chi >= 3 * eta:
        raise DomainError(f"no boundary excitation in this channel: chi = {chi:.6g} >= 3η = {3 * eta:.6g}")

    report = classify_pattern(ground, params)
    zbar = list(report.zset.zbar)
    tags = list(report.zset.tags)
    free = set(range(len(zbar)))

    def nearest(target, allowed):
        candidates = [i for i in allowed if i in free]
        if not candidates:
            return None
        return min(candidates, key=lambda i: zbar_distance(zbar[i], target))

    boundary = [i for i, t in enumerate(tags) if t == BOUNDARY]
    bulk = [i for i, t in enumerate(tags) if t == BULK]

    outer = nearest(np.pi - 1j * (2 * eta + chi), boundary)
    if outer is None:
        raise DomainError("no boundary pair to excite in this channel")
    zbar[outer] = np.pi - 1j * (4 * eta - chi)
    free.discard(outer)

    inner = nearest(-1j * (4 * eta + chi), boundary)
    if inner is None or zbar_distance(zbar[inner], -1j * (4 * eta + chi)) > classification_tolerance(params.n_sites):
        inner = nearest(-5j * eta, bulk)
        if inner is None:
            raise DomainError("no bulk zero left to move into the boundary pair")
        tags[inner] = BOUNDARY
    zbar[inner] = -1j * (2 * eta - chi)
    free.discard(inner)

    outermost = sorted((i for i in bulk if i in free), key=lambda i: -abs(zbar[i].real))[:2]
    for i, zb in zip(outermost, _extra_seeds("I", eta)):
        zbar[i] = zb
        tags[i] = EXTRA
    return ZeroSet.from_zbar(zbar, ground.lambda0, params, tags)


def classification_tolerance(n_sites):
    """0.08 in z_bar at N = 8, halved with every doubling of N"""
    return 0.08 * 8 / n_sites


@dataclass(frozen=True, eq=False)
class PatternReport:
    """Classification of a ground-state zero pattern

    Counts follow the usual enumeration: ``free_boundary_zeroes`` counts points
    (both representatives), every other count is in zeroes, so
    bulk + free/2 + boundary + extra + unclassified = 2N+2.
    """

    regime: str
    n_sites: int
    bulk_pairs: int
    free_boundary_zeroes: int
    boundary_pairs: int
    extra_pairs: int
    unclassified: int
    extra_params: tuple
    deviations: tuple
    consistent: bool
    zset: ZeroSet

    def __repr__(self):
        return f"<PatternReport regime {self.regime} counts {self.counts} consistent={self.consistent}>"

    @property
    def counts(self) -> dict:
        return {
            "bulk_pairs": self.bulk_pairs,
            "free_boundary_zeroes": self.free_boundary_zeroes,
            "boundary_pairs": self.boundary_pairs,
            "extra_pairs": self.extra_pairs,
        }

    def to_dict(self) -> dict:
        return {
            "regime": self.regime,
            "counts": dict(self.counts, unclassified=self.unclassified),
            "extra_params": None if self.extra_params is None else list(self.extra_params),
            "deviations": [None if d is None else float(d) for d in self.deviations],
            "consistent": self.consistent,
        }


def classify_pattern(zset, params, tol=None):
    """Tags every zero as bulk, free boundary, boundary, extra or unclassified

    Free and boundary zeroes are matched to their ideal locations by an optimal
    assignment; the bulk zeroes are the expected number nearest the -5 eta line;
    what remains with depth at least 5 eta is extra. Nothing is ever dropped.

    Returns:
        PatternReport
    """
    eta, n = params.eta, zset.n_sites
    tol = classification_tolerance(n) if tol is None else tol
    regime = regime_of(params)
    expected = expected_counts(regime, n)
    zbar = zset.zbar
    count = len(zbar)

    tags = [UNCLASSIFIED] * count
    deviations = [None] * count

    targets = [(FREE, zb) for zb in _free_targets(eta)]
    targets += [(BOUNDARY, zb) for _, zb in _boundary_targets(params, regime)]
    cost = np.array([[zbar_distance(z, t) for _, t in targets] for z in zbar])
    for i, j in zip(*linear_sum_assignment(cost)):
        if cost[i, j] <= tol:
            tags[i] = targets[j][0]
            deviations[i] = float(cost[i, j])

    remaining = [i for i in range(count) if tags[i] == UNCLASSIFIED]
    line_gap = {i: abs(zbar[i].imag + 5 * eta) for i in remaining}
    near_line = sorted((i for i in remaining if line_gap[i] < eta), key=lambda i: line_gap[i])
    for i in near_line[:max(expected["bulk_pairs"], 0)]:
        tags[i] = BULK
        deviations[i] = float(line_gap[i])

    extras = []
    for i in range(count):
        if tags[i] == UNCLASSIFIED and zbar[i].imag <= -5 * eta + tol:
            tags[i] = EXTRA
            extras.append(i)

    extra_params = None
    if extras:
        beta = float(np.mean([-zbar[i].imag for i in extras]))
        alpha = float(np.mean([min(abs(zbar[i].real), np.pi - abs(zbar[i].real)) for i in extras]))
        extra_params = (alpha, beta)

    found = {
        "bulk_pairs": tags.count(BULK),
        "free_boundary_zeroes": 2 * tags.count(FREE),
        "boundary_pairs": tags.count(BOUNDARY),
        "extra_pairs": tags.count(EXTRA),
    }
    consistent = found == expected and UNCLASSIFIED not in tags
    if not consistent:
        log.warning("pattern %s does not match regime %s (expected %s)", found, regime, expected)

    return PatternReport(
        regime=regime,
        n_sites=n,
        unclassified=tags.count(UNCLASSIFIED),
        extra_params=extra_params,
        deviations=tuple(deviations),
        consistent=consistent,
        zset=zset.with_tags(tags),
        **found,
    )
