"""Transfer matrices, Hamiltonians and exact diagonalization

Operators on the chain act on (C^3)^N with site 1 as the most significant tensor
factor. Products of R-matrices are applied by tensor contraction on a state that
carries the auxiliary space as an extra axis, so the 3^(N+1) square monodromy is
never formed when only t(u) is needed.
"""

import hashlib
import json
import logging
import os
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import lax
from .errors import HomogeneityError, NormalizationError, SizeCapError
from .timer import Timer
from .trigpoly import circle_abscissae

log = logging.getLogger(__name__)

OPEN = "open"
PERIODIC = "periodic"
BOUNDARY_KINDS = (OPEN, PERIODIC)

SIZE_CAP = 8
DEGENERACY_GAP = 1e-9
FD_STEP = 1e-4
LARGE_DIMENSION = 3 ** 6  # dense problems above this size are logged as a warning
CHUNK_ELEMENTS = 2 ** 22  # complex entries per contraction batch

# Generic reference point for resolving degeneracies and inhomogeneous spectra
U_REF = 0.37 + 0.61j


def _check_kind(boundary_kind):
    if boundary_kind not in BOUNDARY_KINDS:
        raise ValueError(f"boundary_kind must be one of {BOUNDARY_KINDS}, not '{boundary_kind}'")


def _check_size(params, cap):
    if params.n_sites > cap:
        raise SizeCapError(f"size cap: N = {params.n_sites} exceeds the dense limit {cap}")


def _apply_pair(state, op, axis_a, axis_b):
    """Applies a two-space operator op[out_a, out_b, in_a, in_b] on two axes of state"""
    out = np.tensordot(op, state, axes=([2, 3], [axis_a, axis_b]))
    return np.moveaxis(out, [0, 1], [axis_a, axis_b])


def _apply_aux(state, k):
    # axis 1 is the auxiliary space
    out = np.tensordot(k, state, axes=([1], [1]))
    return np.moveaxis(out, 0, 1)


def _sweep_t(params, u, state):
    """T_0(u) = R_0N(u - theta_N) ... R_01(u - theta_1); R_01 acts first"""
    for j, theta in enumerate(params.theta):
        r = lax.r_matrix(params, u - theta).reshape(3, 3, 3, 3)
        state = _apply_pair(state, r, 1, j + 2)
    return state


def _sweep_t_hat(params, u, state):
    """T^_0(u) = R_10(u + theta_1) ... R_N0(u + theta_N); R_N0 acts first"""
    for j in reversed(range(params.n_sites)):
        r = lax.r_matrix(params, u + params.theta[j]).reshape(3, 3, 3, 3)
        state = _apply_pair(state, r, j + 2, 1)
    return state


def _seeded(vectors, n_sites):
    """Stacks |a>_0 x vectors for each auxiliary start a: axes (start, aux, sites..., batch)"""
    m = vectors.shape[1]
    state = np.zeros((3, 3) + (3,) * n_sites + (m,), dtype=complex)
    block = vectors.reshape((3,) * n_sites + (m,))
    for a in range(3):
        state[a, a] = block
    return state


def _double_row(params, u, state, boundary_kind):
    if boundary_kind == OPEN:
        state = _sweep_t_hat(params, u, state)
        state = _apply_aux(state, lax.k_left(params, u))
        state = _sweep_t(params, u, state)
        return _apply_aux(state, lax.k_right(params, u))
    return _sweep_t(params, u, state)


def apply_transfer(params, u, vectors, boundary_kind=OPEN, cap=SIZE_CAP):
    """Applies t(u) to one vector or to the columns of a matrix

    Args:
        params (ModelParams): Model parameters
        u (complex): Spectral parameter
        vectors (numpy array): Shape (3**N,) or (3**N, m)
        boundary_kind (str): 'open' or 'periodic'
        cap (int): Largest N accepted

    Returns:
        numpy array with the shape of vectors
    """
    _check_kind(boundary_kind)
    _check_size(params, cap)
    n = params.n_sites
    dim = 3 ** n
    vectors = np.asarray(vectors, dtype=complex)
    single = vectors.ndim == 1
    columns = vectors.reshape(dim, -1)

    chunk = max(1, CHUNK_ELEMENTS // (9 * dim))
    result = np.empty_like(columns)
    for start in range(0, columns.shape[1], chunk):
        state = _seeded(columns[:, start:start + chunk], n)
        state = _double_row(params, u, state, boundary_kind)
        result[:, start:start + chunk] = np.trace(state, axis1=0, axis2=1).reshape(dim, -1)
    return result[:, 0] if single else result


def transfer_matrix(params, u, boundary_kind=OPEN, cap=SIZE_CAP):
    """The dense 3**N x 3**N transfer matrix t(u)

    Open chains use tr_0{K^R_0 T_0 K^L_0 T^_0}, periodic chains tr_0 T_0.

    Raises:
        SizeCapError: If N exceeds cap
    """
    _check_size(params, cap)
    return apply_transfer(params, u, np.eye(3 ** params.n_sites, dtype=complex), boundary_kind, cap)


def monodromy(params, u, cap=SIZE_CAP):
    """The single-row monodromies T_0(u) and T^_0(u)

    Returns:
        (T, T_hat): arrays of shape (3, 3, 3**N, 3**N); T[a, b] is the quantum
        operator in auxiliary row a, column b
    """
    _check_size(params, cap)
    dim = 3 ** params.n_sites
    seed = _seeded(np.eye(dim, dtype=complex), params.n_sites)
    t = _sweep_t(params, u, seed)
    t_hat = _sweep_t_hat(params, u, seed)
    # state[b, a] holds row a, column b
    shape = (3, 3, dim, dim)
    return (np.swapaxes(t, 0, 1).reshape(shape), np.swapaxes(t_hat, 0, 1).reshape(shape))


class TransferOperator:
    """t(u) as a callable for one parameter set and boundary kind"""

    def __init__(self, params, boundary_kind=OPEN, cap=SIZE_CAP):
        _check_kind(boundary_kind)
        _check_size(params, cap)
        self.params = params
        self.boundary_kind = boundary_kind
        self.cap = cap

    def __repr__(self):
        return f"<TransferOperator {self.boundary_kind} N={self.params.n_sites}>"

    def __call__(self, u):
        return transfer_matrix(self.params, u, self.boundary_kind, self.cap)

    def apply(self, u, vectors):
        return apply_transfer(self.params, u, vectors, self.boundary_kind, self.cap)


def weyl(a, b):
    """E^{ab} = |a><b| with 1-based a, b"""
    e = np.zeros((3, 3), dtype=complex)
    e[a - 1, b - 1] = 1.0
    return e


def _pair(a, b, c, d):
    return np.kron(weyl(a, b), weyl(c, d))


def bulk_density(params):
    """The two-site bulk Hamiltonian density acting on sites (j, j+1)"""
    eta = params.eta
    sh, ch, ex = np.sinh, np.cosh, np.exp
    h = (
        ch(5 * eta) * (_pair(1, 1, 1, 1) + _pair(3, 3, 3, 3))
        + sh(2 * eta) * (sh(3 * eta) - ch(3 * eta)) * (_pair(1, 1, 2, 2) + _pair(2, 2, 3, 3))
        + sh(2 * eta) * (sh(3 * eta) + ch(3 * eta)) * (_pair(2, 2, 1, 1) + _pair(3, 3, 2, 2))
        + 2 * sh(eta) * sh(2 * eta) * (ex(-2 * eta) * _pair(1, 1, 3, 3) + ex(2 * eta) * _pair(3, 3, 1, 1))
        + ch(eta) * (_pair(1, 3, 3, 1) + _pair(3, 1, 1, 3))
        + ch(3 * eta) * (
            _pair(1, 2, 2, 1) + _pair(2, 1, 1, 2) + _pair(2, 2, 2, 2) + _pair(2, 3, 3, 2) + _pair(3, 2, 2, 3)
        )
        - ex(-2 * eta) * sh(2 * eta) * (_pair(1, 2, 3, 2) + _pair(2, 1, 2, 3))
        + ex(2 * eta) * sh(2 * eta) * (_pair(2, 3, 2, 1) + _pair(3, 2, 1, 2))
    )
    return 2 * h / (sh(5 * eta) - sh(eta))


def left_field(params):
    """One-site boundary term acting on site 1"""
    eta, eps, sigma = params.eta, params.eps, params.sigma_l
    prefactor = 2 * np.exp(-eps) / (1 + 2 * np.exp(-eps) * np.sinh(eta))
    return prefactor * (
        np.sinh(eta) * (weyl(1, 1) - weyl(3, 3))
        + np.cosh(eta) * weyl(2, 2)
        - np.exp(1j * sigma) * weyl(1, 3)
        - np.exp(-1j * sigma) * weyl(3, 1)
    )


def right_field(params):
    """One-site boundary term acting on site N, constant shift included"""
    eta, sigma = params.eta, params.sigma_r
    sh, ch, ex = np.sinh, np.cosh, np.exp
    q = ex(-params.eps_prime)

    shifted = 1 + 2 * q * sh(5 * eta)
    c11 = (
        (ex(2 * eta) - 2 * ex(-4 * eta) * q * sh(eta)) * ch(5 * eta)
        + shifted * sh(2 * eta) * (sh(3 * eta) - ch(3 * eta))
        + 2 * (ex(-4 * eta) - 2 * ex(2 * eta) * q * sh(eta)) * sh(eta) * sh(2 * eta)
    )
    c22 = (
        (ex(2 * eta) - 2 * ex(-4 * eta) * q * sh(eta)) * sh(2 * eta) * (sh(3 * eta) + ch(3 * eta))
        + shifted * ch(3 * eta)
        + (ex(-2 * eta) - 2 * ex(4 * eta) * q * sh(eta)) * sh(2 * eta) * (sh(3 * eta) - ch(3 * eta))
    )
    c33 = (
        2 * (ex(4 * eta) - 2 * ex(-2 * eta) * q * sh(eta)) * sh(eta) * sh(2 * eta)
        + shifted * sh(2 * eta) * (sh(3 * eta) + ch(3 * eta))
        + (ex(-2 * eta) - 2 * ex(4 * eta) * q * sh(eta)) * ch(5 * eta)
    )
    trace = 2 * ch(2 * eta) - 4 * q * sh(eta) * ch(4 * eta) + 1 + 2 * q * sh(5 * eta)
    off = -2 * q * sh(6 * eta) * ch(eta)
    field = (
        c11 * weyl(1, 1) + c22 * weyl(2, 2) + c33 * weyl(3, 3)
        + off * (ex(2 * eta + 1j * sigma) * weyl(1, 3) + ex(-2 * eta - 1j * sigma) * weyl(3, 1))
    )
    constant = 2 * q * (2 * sh(eta) * sh(4 * eta) - ch(5 * eta)) / trace
    return 2 * field / ((sh(5 * eta) - sh(eta)) * trace) - constant * np.eye(3)


def hamiltonian_explicit(params, boundary_kind=OPEN, cap=SIZE_CAP):
    """The Hamiltonian assembled from its local terms

    Open chains carry bulk terms on bonds (j, j+1) plus the two boundary fields;
    periodic chains carry bulk terms on every bond including (N, 1).

    Raises:
        HomogeneityError: If any inhomogeneity is nonzero
        SizeCapError: If N exceeds cap
    """
    _check_kind(boundary_kind)
    _check_size(params, cap)
    if not params.homogeneous:
        raise HomogeneityError("explicit form valid only at θ=0")
    n = params.n_sites
    if boundary_kind == PERIODIC and n < 2:
        raise ValueError("A periodic chain needs at least 2 sites for its explicit Hamiltonian")

    dim = 3 ** n
    h = bulk_density(params)
    ham = np.zeros((dim, dim), dtype=complex)
    for j in range(n - 1):
        ham += np.kron(np.kron(np.eye(3 ** j), h), np.eye(3 ** (n - j - 2)))

    if boundary_kind == PERIODIC:
        ham += lax.embed(h, (n - 1, 0), n)
    else:
        ham += np.kron(left_field(params), np.eye(3 ** (n - 1)))
        ham += np.kron(np.eye(3 ** (n - 1)), right_field(params))
    return ham


def _derivative(f, u, step):
    """Central difference with one Richardson level"""
    coarse = (f(u + step) - f(u - step)) / (2 * step)
    fine = (f(u + step / 2) - f(u - step / 2)) / step
    return (4 * fine - coarse) / 3


def hamiltonian_from_transfer(params, boundary_kind=OPEN, step=FD_STEP, cap=SIZE_CAP):
    """-d/du ln t(u) at u = 0 (twice that for periodic chains)

    Raises:
        HomogeneityError: If any inhomogeneity is nonzero
        NormalizationError: If t(0) is numerically zero
    """
    _check_kind(boundary_kind)
    if not params.homogeneous:
        raise HomogeneityError("hamiltonian_from_transfer is defined at θ=0")
    t0 = transfer_matrix(params, 0.0, boundary_kind, cap)
    dt = _derivative(lambda u: transfer_matrix(params, u, boundary_kind, cap), 0.0, step)

    if boundary_kind == OPEN:
        scalar = np.trace(t0) / t0.shape[0]
        if abs(scalar) < 1e-12:
            raise NormalizationError(f"singular normalization: t(0) = {scalar:.3e} x id")
        return -dt / scalar

    if np.max(np.abs(t0)) < 1e-12:
        raise NormalizationError("singular normalization: t(0) vanishes")
    # H = -2 t'(0) t(0)^{-1}
    return -2 * np.linalg.solve(t0.T, dt.T).T


def default_u_grid(params, boundary_kind=OPEN):
    """Sample points for eigenvalue curves

    Five vertical lines centred on Re u = 3 eta, each carrying one more point
    than the curve has coefficients. Lines at both sides of the centre pin down
    the outer coefficients that a single line resolves poorly.
    """
    _check_kind(boundary_kind)
    eta, n = params.eta, params.n_sites
    count = 4 * n + 6 if boundary_kind == OPEN else 2 * n + 2
    offsets = tuple(eta * k for k in (-5.0, -2.5, 0.0, 2.5, 5.0))
    return circle_abscissae(count, center=3 * eta, offsets=offsets, step=2)


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """Eigen-decomposition of a chain together with sampled eigenvalue curves

    ``lambda_curves[i, k]`` is the transfer-matrix eigenvalue of state
    ``states[i]`` at ``u_grid[k]``. States are sorted by energy.
    """

    params: lax.ModelParams
    boundary_kind: str
    energies: np.ndarray
    eigenvectors: np.ndarray
    u_grid: np.ndarray
    lambda_curves: np.ndarray
    states: tuple
    imaginary_parts: np.ndarray = field(default=None)
    ground_index: int = 0

    def __repr__(self):
        return (
            f"<SpectrumResult {self.boundary_kind} N={self.params.n_sites} "
            f"{len(self.energies)} states, ground {self.energies[self.ground_index]:.10f}>"
        )

    @property
    def dimension(self) -> int:
        return len(self.energies)

    def curve(self, state):
        """(u, Lambda(u)) samples for one state"""
        row = self.states.index(state)
        return list(zip(self.u_grid, self.lambda_curves[row]))


def rayleigh(params, u, vectors, boundary_kind=OPEN, cap=SIZE_CAP):
    """v^dagger t(u) v / v^dagger v for each column v"""
    tv = apply_transfer(params, u, vectors, boundary_kind, cap)
    return np.sum(vectors.conj() * tv, axis=0) / np.sum(np.abs(vectors) ** 2, axis=0)


def eigenvalues_at(result, u):
    """Transfer-matrix eigenvalues at u for the states carrying curves"""
    vectors = result.eigenvectors[:, list(result.states)]
    return rayleigh(result.params, u, vectors, result.boundary_kind, cap=result.params.n_sites)


def _clusters(energies, gap):
    groups, current = [], [0]
    for i in range(1, len(energies)):
        if energies[i] - energies[i - 1] < gap:
            current.append(i)
        else:
            groups.append(current)
            current = [i]
    groups.append(current)
    return groups


def _resolve_degeneracies(params, energies, vectors, boundary_kind, cap):
    """Rotates each degenerate energy cluster onto joint eigenvectors of t(U_REF)"""
    vectors = vectors.copy()
    for group in _clusters(energies, DEGENERACY_GAP):
        if len(group) == 1:
            continue
        block = vectors[:, group]
        reduced = block.conj().T @ apply_transfer(params, U_REF, block, boundary_kind, cap)
        _, rotation = np.linalg.eig(reduced)
        rotated = block @ rotation
        vectors[:, group] = rotated / np.linalg.norm(rotated, axis=0)
        log.debug("resolved a cluster of %d degenerate states at E = %.6f", len(group), energies[group[0]])
    return vectors


def _energy_scale(boundary_kind):
    return 1.0 if boundary_kind == OPEN else 2.0


def _inhomogeneous_spectrum(params, boundary_kind, cap):
    """Energies -d/du ln Lambda(0) from eigenvectors of t(U_REF)"""
    _, vectors = np.linalg.eig(transfer_matrix(params, U_REF, boundary_kind, cap))
    vectors = vectors / np.linalg.norm(vectors, axis=0)
    at_zero = rayleigh(params, 0.0, vectors, boundary_kind, cap)
    slope = _derivative(lambda u: rayleigh(params, u, vectors, boundary_kind, cap), 0.0, FD_STEP)
    energies = -_energy_scale(boundary_kind) * slope / at_zero
    order = np.argsort(energies.real, kind="stable")
    return energies.real[order], energies.imag[order], vectors[:, order]


def diagonalize(params, boundary_kind=OPEN, u_grid=None, states=None, cap=SIZE_CAP, cache=None):
    """Exact diagonalization plus eigenvalue curves on a grid

    Homogeneous chains diagonalize the explicit Hamiltonian and resolve
    degenerate clusters against t(u). Inhomogeneous chains diagonalize t(u)
    directly and read energies off the eigenvalue curves.

    Args:
        params (ModelParams): Model parameters
        boundary_kind (str): 'open' or 'periodic'
        u_grid (array): Abscissae for the eigenvalue curves; default_u_grid if None
        states (iterable): Indices (into the sorted spectrum) that get curves; all if None
        cap (int): Largest N accepted
        cache (SpectrumCache): Optional on-disk cache

    Returns:
        SpectrumResult
    """
    _check_kind(boundary_kind)
    _check_size(params, cap)
    u_grid = default_u_grid(params, boundary_kind) if u_grid is None else np.asarray(u_grid, dtype=complex)

    if cache is not None:
        hit = cache.load(params, boundary_kind, u_grid, states)
        if hit is not None:
            return hit

    dim = 3 ** params.n_sites
    if dim > LARGE_DIMENSION:
        log.warning("dense eigendecomposition of dimension %d", dim)

    with Timer("diagonalize") as timer:
        if params.homogeneous:
            ham = hamiltonian_explicit(params, boundary_kind, cap)
            energies, vectors = scipy.linalg.eigh(ham)
            vectors = _resolve_degeneracies(params, energies, vectors, boundary_kind, cap)
            imaginary = np.zeros_like(energies)
        else:
            energies, imaginary, vectors = _inhomogeneous_spectrum(params, boundary_kind, cap)

        states = tuple(range(dim)) if states is None else tuple(int(s) for s in states)
        selected = vectors[:, list(states)]
        curves = np.array([rayleigh(params, u, selected, boundary_kind, cap) for u in u_grid]).T

    log.info("diagonalized %s N=%d (dimension %d) in %.3fs", boundary_kind, params.n_sites, dim, timer.time)
    result = SpectrumResult(params, boundary_kind, energies, vectors, u_grid, curves, states, imaginary)
    if cache is not None:
        cache.store(result)
    return result


class SpectrumCache:
    """Eigenvector cache in a directory of .npz files keyed by a parameter hash"""

    def __init__(self, directory):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)

    def __repr__(self):
        return f"<SpectrumCache '{self.directory}'>"

    @staticmethod
    def key(params, boundary_kind, u_grid, states):
        payload = {
            "params": params.to_dict(),
            "boundary_kind": boundary_kind,
            "u_grid": [[float(u.real), float(u.imag)] for u in np.asarray(u_grid, dtype=complex)],
            "states": None if states is None else [int(s) for s in states],
        }
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()

    def _path(self, key):
        return os.path.join(self.directory, f"{key}.npz")

    def load(self, params, boundary_kind, u_grid, states=None):
        path = self._path(self.key(params, boundary_kind, u_grid, states))
        if not os.path.exists(path):
            return None
        with np.load(path, allow_pickle=False) as data:
            log.debug("spectrum cache hit %s", path)
            return SpectrumResult(
                params,
                boundary_kind,
                data["energies"],
                data["eigenvectors"],
                data["u_grid"],
                data["lambda_curves"],
                tuple(int(s) for s in data["states"]),
                data["imaginary_parts"],
            )

    def store(self, result):
        states = None if len(result.states) == result.dimension else result.states
        path = self._path(self.key(result.params, result.boundary_kind, result.u_grid, states))
        np.savez(
            path,
            energies=result.energies,
            eigenvectors=result.eigenvectors,
            u_grid=result.u_grid,
            lambda_curves=result.lambda_curves,
            states=np.array(result.states),
            imaginary_parts=result.imaginary_parts,
        )
        return path


class RelationReport:
    """Per-state residuals of the eigenvalue relations"""

    def __init__(self, boundary_kind, residuals):
        self.boundary_kind = boundary_kind
        self.residuals = residuals  # {state: {relation: residual}}

    def __repr__(self):
        return f"<RelationReport {self.boundary_kind} {len(self.residuals)} states, max {self.max_residual:.2e}>"

    @property
    def max_residual(self) -> float:
        return max((r for rows in self.residuals.values() for r in rows.values()), default=0.0)

    def worst(self):
        """(state, relation, residual) with the largest residual"""
        return max(
            ((s, name, r) for s, rows in self.residuals.items() for name, r in rows.items()),
            key=lambda item: item[2],
        )


def _mismatch(lhs, rhs):
    return np.abs(lhs - rhs) / np.maximum(np.abs(lhs) + np.abs(rhs), 1e-300)


def check_functional_relations(result, points=(0.3 + 0.2j, -0.7 + 1.1j, 1.3 - 0.4j)):
    """Evaluates the eigenvalue relations for every state carrying a curve

    Open chains: crossing symmetry at the given points, both product relations at
    u = +theta_j and u = -theta_j, the four special values and the asymptotic
    coefficient at Re u = +40 and -40, or nearer for chains whose Lambda would
    overflow there. Periodic chains: both product relations
    at u = theta_j.

    Returns:
        RelationReport
    """
    params = result.params
    eta, n = params.eta, params.n_sites
    fns = lax.scalar_functions(params)
    shift = 6 * eta + 1j * np.pi

    def lam(u):
        return eigenvalues_at(result, u)

    rows = {s: {} for s in result.states}

    def record(name, values):
        for s, v in zip(result.states, values):
            rows[s][name] = max(rows[s].get(name, 0.0), float(v))

    if result.boundary_kind == PERIODIC:
        for theta in params.theta:
            record("product_crossing", _mismatch(
                lam(theta) * lam(theta + shift), fns.a_periodic(theta) * fns.d_periodic(theta + shift)
            ))
            record("product_fusion", _mismatch(
                lam(theta) * lam(theta + 4 * eta), fns.delta_periodic(theta) * lam(theta + 2 * eta + 1j * np.pi)
            ))
        return RelationReport(PERIODIC, rows)

    for u in points:
        record("crossing", _mismatch(lam(u), lam(-u + shift)))

    for theta in np.concatenate([params.theta, -params.theta]):
        record("product_crossing", _mismatch(
            lam(theta) * lam(theta + shift) * fns.phi1(2 * theta), fns.delta1(theta)
        ))
        record("product_fusion", _mismatch(
            lam(theta) * lam(theta + 4 * eta) * fns.phi2(-2 * theta + 8 * eta),
            fns.delta2(theta) * lam(theta + 2 * eta + 1j * np.pi),
        ))

    zero, i_pi = lax.lambda_at_zero(params), lax.lambda_at_i_pi(params)
    record("value_0", _mismatch(lam(0.0), zero))
    record("value_0", _mismatch(lam(shift), zero))
    record("value_i_pi", _mismatch(lam(1j * np.pi), i_pi))
    record("value_i_pi", _mismatch(lam(6 * eta), i_pi))

    c0 = lax.asymptotic_coefficient(params)
    growth = 2 * n + 2
    # Re u stays at 40 until Lambda(u) would overflow a double
    far = min(40.0, 600.0 / growth) + 0.3j
    record("asymptotic", _mismatch(lam(far) * np.exp(-growth * far + 3 * growth * eta), c0))
    record("asymptotic", _mismatch(lam(-far) * np.exp(-growth * far - 3 * growth * eta), c0))
    return RelationReport(OPEN, rows)
