"""R-matrix, reflection matrices and scalar functions of the Izergin-Korepin chain

Matrices act on C^3 (one site) or C^3 x C^3 (two sites). Two-site states
|a> x |b> sit at row 3a + b, so the first tensor factor is the most significant.
"""

import dataclasses
import logging
from dataclasses import dataclass

import numpy as np

from .trigpoly import HyperbolicFactor, HyperbolicProduct

log = logging.getLogger(__name__)

IDENTITIES = ("qybe", "unitarity", "crossing", "pt", "periodicity", "re", "dual_re")

# Number of spectral parameters each identity takes
ARITY = {
    "qybe": 3,
    "unitarity": 1,
    "crossing": 1,
    "pt": 1,
    "periodicity": 1,
    "re": 2,
    "dual_re": 2,
}

_IDENTITY3 = np.eye(3, dtype=complex)
_IDENTITY9 = np.eye(9, dtype=complex)


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the open chain

    ``thetas`` holds the real parts theta_bar_j of the purely imaginary
    inhomogeneities theta_j = i theta_bar_j. Leave it empty for the homogeneous
    chain. The right boundary angle is stored as its real part sigma_r_bar; the
    complex angle is sigma_r_bar + 2i eta.
    """

    eta: float
    eps: float
    eps_prime: float
    sigma_l: float = 0.0
    sigma_r_bar: float = 0.0
    n_sites: int = 1
    thetas: tuple = ()

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, not {self.eta}")
        if type(self.n_sites) != int or self.n_sites < 1:
            raise ValueError(f"n_sites must be a positive integer, not {self.n_sites}")
        for name in ("sigma_l", "sigma_r_bar"):
            angle = getattr(self, name)
            if not -np.pi < angle <= np.pi:
                raise ValueError(f"{name} must lie in (-pi, pi], not {angle}")

        thetas = tuple(float(t) for t in self.thetas) if self.thetas else (0.0,) * self.n_sites
        if len(thetas) != self.n_sites:
            raise ValueError(f"Expected {self.n_sites} inhomogeneities, got {len(thetas)}")
        object.__setattr__(self, "thetas", thetas)

    @classmethod
    def random(cls, rng, n_sites=1, inhomogeneous=False):
        """Draws parameters from the hermiticity set

        Args:
            rng (numpy.random.Generator): Source of randomness
            n_sites (int): Chain length
            inhomogeneous (bool): Also draw small theta_bar_j values
        """
        thetas = tuple(rng.uniform(-0.3, 0.3, n_sites)) if inhomogeneous else ()
        return cls(
            eta=rng.uniform(0.1, 0.8),
            eps=rng.uniform(-2.0, 2.0),
            eps_prime=rng.uniform(-2.0, 2.0),
            sigma_l=rng.uniform(-np.pi, np.pi),
            sigma_r_bar=rng.uniform(-np.pi, np.pi),
            n_sites=n_sites,
            thetas=thetas,
        )

    def replace(self, **changes):
        """Returns a copy with some fields changed; n_sites changes reset thetas"""
        if "n_sites" in changes and "thetas" not in changes:
            changes["thetas"] = ()
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "eta": self.eta,
            "eps": self.eps,
            "eps_prime": self.eps_prime,
            "sigma_l": self.sigma_l,
            "sigma_r_bar": self.sigma_r_bar,
            "n_sites": self.n_sites,
            "thetas": list(self.thetas),
        }

    @property
    def sigma_r(self) -> complex:
        """The complex right boundary angle"""
        return self.sigma_r_bar + 2j * self.eta

    @property
    def theta(self) -> np.ndarray:
        """The inhomogeneities i theta_bar_j"""
        return 1j * np.array(self.thetas)

    @property
    def homogeneous(self) -> bool:
        return not any(self.thetas)

    @property
    def chi_plus(self) -> float:
        return float(np.arcsinh(np.exp(self.eps) / 2))

    @property
    def chi_minus(self) -> float:
        return float(np.arcsinh(np.exp(self.eps_prime) / 2))

    @property
    def chi_min(self) -> float:
        # Ties go to the left boundary's chi_plus
        return self.chi_plus if self.chi_plus <= self.chi_minus else self.chi_minus

    @property
    def chi_max(self) -> float:
        return self.chi_minus if self.chi_plus <= self.chi_minus else self.chi_plus


def eps_from_chi(chi):
    """Inverse of chi = arcsinh(exp(eps) / 2)"""
    if chi <= 0:
        raise ValueError(f"chi must be positive, not {chi}")
    return float(np.log(2 * np.sinh(chi)))


def r_entries(eta, u):
    """The eleven distinct entry functions of the R-matrix at u"""
    sh, ch, ex = np.sinh, np.cosh, np.exp
    u = complex(u)
    return {
        "h1": sh(u - 3 * eta) - sh(5 * eta) + sh(3 * eta) + sh(eta),
        "h2": sh(u - 3 * eta) + sh(3 * eta),
        "h3": sh(u - 5 * eta) + sh(eta),
        "h4": sh(u - eta) + sh(eta),
        "e": -2 * ex(-u / 2) * sh(2 * eta) * ch(u / 2 - 3 * eta),
        "e_bar": -2 * ex(u / 2) * sh(2 * eta) * ch(u / 2 - 3 * eta),
        "f": -2 * ex(-u + 2 * eta) * sh(eta) * sh(2 * eta) - ex(-eta) * sh(4 * eta),
        "f_bar": 2 * ex(u - 2 * eta) * sh(eta) * sh(2 * eta) - ex(eta) * sh(4 * eta),
        "g": 2 * ex(-u / 2 + 2 * eta) * sh(u / 2) * sh(2 * eta),
        "g_bar": -2 * ex(u / 2 - 2 * eta) * sh(u / 2) * sh(2 * eta),
    }


# (row, col, entry) for the 19 nonzero entries
_R_LAYOUT = (
    (0, 0, "h3"), (1, 1, "h2"), (2, 2, "h4"),
    (3, 3, "h2"), (4, 4, "h1"), (5, 5, "h2"),
    (6, 6, "h4"), (7, 7, "h2"), (8, 8, "h3"),
    (1, 3, "e"), (3, 1, "e_bar"), (5, 7, "e"), (7, 5, "e_bar"),
    (2, 4, "g"), (4, 6, "g"), (4, 2, "g_bar"), (6, 4, "g_bar"),
    (2, 6, "f"), (6, 2, "f_bar"),
)


def r_matrix(params, u):
    """The 9x9 R-matrix R_12(u)

    Args:
        params (ModelParams): Only eta is used
        u (complex): Spectral parameter

    Returns:
        numpy array of shape (9, 9)
    """
    entries = r_entries(params.eta, u)
    r = np.zeros((9, 9), dtype=complex)
    for row, col, name in _R_LAYOUT:
        r[row, col] = entries[name]
    return r


def permutation_matrix():
    """P |a>|b> = |b>|a> on C^3 x C^3"""
    p = np.zeros((9, 9))
    for a in range(3):
        for b in range(3):
            p[3 * a + b, 3 * b + a] = 1.0
    return p


_P = permutation_matrix()


def r_matrix_21(params, u):
    """R_21(u) = P R_12(u) P"""
    return _P @ r_matrix(params, u) @ _P


def crossing_matrix(params):
    eta = params.eta
    v = np.zeros((3, 3), dtype=complex)
    v[0, 2] = -np.exp(-eta)
    v[1, 1] = 1.0
    v[2, 0] = -np.exp(eta)
    return v


def m_matrix(params):
    """M = diag(e^{2 eta}, 1, e^{-2 eta})"""
    eta = params.eta
    return np.diag([np.exp(2 * eta), 1.0, np.exp(-2 * eta)]).astype(complex)


def _reflection(eta, u, eps, sigma):
    u = complex(u)
    k = np.zeros((3, 3), dtype=complex)
    k[0, 0] = 1 + 2 * np.exp(-u - eps) * np.sinh(eta)
    k[1, 1] = 1 - 2 * np.exp(-eps) * np.sinh(u - eta)
    k[2, 2] = 1 + 2 * np.exp(u - eps) * np.sinh(eta)
    k[0, 2] = 2 * np.exp(-eps + 1j * sigma) * np.sinh(u)
    k[2, 0] = 2 * np.exp(-eps - 1j * sigma) * np.sinh(u)
    return k


def k_left(params, u):
    """The left reflection matrix K^L(u)"""
    return _reflection(params.eta, u, params.eps, params.sigma_l)


def k_right(params, u):
    """The right reflection matrix K^R(u) = M K^L(-u + 6 eta + i pi) with primed parameters"""
    eta = params.eta
    return m_matrix(params) @ _reflection(eta, -u + 6 * eta + 1j * np.pi, params.eps_prime, params.sigma_r)


class ScalarFunctions:
    """The scalar functions entering unitarity and the eigenvalue relations

    Each attribute is a HyperbolicProduct, so it can be called at a point or
    expanded in a Taylor series:

    - phi1, phi2, phi3: the unitarity and fusion factors
    - delta1, delta2: the quantum-determinant-like right-hand sides, with the
      product over inhomogeneities included
    - a_periodic, d_periodic, delta_periodic: their counterparts for the
      periodic chain
    """

    def __init__(self, params):
        self.params = params
        eta = params.eta
        theta = params.theta

        self.phi1 = HyperbolicProduct([
            HyperbolicFactor(0.5, -2 * eta),
            HyperbolicFactor(0.5, 2 * eta),
            HyperbolicFactor(0.5, -3 * eta, "cosh"),
            HyperbolicFactor(0.5, 3 * eta, "cosh"),
        ], -4.0)
        self.phi2 = HyperbolicProduct([
            HyperbolicFactor(0.5, -5 * eta, "cosh"),
            HyperbolicFactor(0.5, -eta, "cosh"),
            HyperbolicFactor(0.5, 0.0),
            HyperbolicFactor(0.5, -6 * eta),
        ], -4.0)
        self.phi3 = HyperbolicProduct([
            HyperbolicFactor(0.5, 2 * eta),
            HyperbolicFactor(0.5, -3 * eta, "cosh"),
        ], -2.0)

        def boundary(eps, sign):
            # 1 - 2 e^{-eps} sinh(u - eta) for sign -1, 1 + 2 e^{-eps} sinh(u + eta) for sign +1
            return HyperbolicFactor(1.0, sign * eta, offset=1.0, weight=2 * sign * np.exp(-eps))

        inhomogeneous1 = HyperbolicProduct()
        inhomogeneous3 = HyperbolicProduct()
        for t in theta:
            inhomogeneous1 = inhomogeneous1 * self.phi1.shifted(-t) * self.phi1.shifted(t)
            inhomogeneous3 = inhomogeneous3 * self.phi3.shifted(-t) * self.phi3.shifted(t)

        self.delta1 = HyperbolicProduct([
            boundary(params.eps, -1), boundary(params.eps, 1),
            boundary(params.eps_prime, -1), boundary(params.eps_prime, 1),
            HyperbolicFactor(1.0, 6 * eta),
            HyperbolicFactor(1.0, eta, "cosh"),
            HyperbolicFactor(1.0, -6 * eta),
            HyperbolicFactor(1.0, -eta, "cosh"),
        ], -4.0) * inhomogeneous1
        self.delta2 = HyperbolicProduct([
            boundary(params.eps, -1), boundary(params.eps_prime, -1),
            HyperbolicFactor(1.0, 4 * eta),
            HyperbolicFactor(1.0, -6 * eta),
            HyperbolicFactor(1.0, -eta, "cosh"),
            HyperbolicFactor(1.0, -eta, "cosh"),
        ], -4.0) * inhomogeneous3

        self.a_periodic = HyperbolicProduct(
            [HyperbolicFactor(1.0, -t - 5 * eta, offset=np.sinh(eta)) for t in theta]
        )
        self.d_periodic = HyperbolicProduct(
            [HyperbolicFactor(1.0, -t - eta, offset=np.sinh(eta)) for t in theta]
        )
        self.delta_periodic = HyperbolicProduct(
            [HyperbolicFactor(0.5, -t / 2 - 3 * eta, "cosh") for t in theta]
            + [HyperbolicFactor(0.5, -t / 2 + 2 * eta) for t in theta],
            (-2.0) ** len(theta),
        )

    def __repr__(self):
        return f"<ScalarFunctions eta={self.params.eta} N={self.params.n_sites}>"


def scalar_functions(params):
    return ScalarFunctions(params)


def lambda_at_zero(params):
    """Common eigenvalue of t(0) = t(6 eta + i pi)"""
    phi1 = scalar_functions(params).phi1
    return complex(
        (1 + 2 * np.exp(-params.eps) * np.sinh(params.eta))
        * np.trace(k_right(params, 0.0))
        * np.prod([phi1(-t) for t in params.theta])
    )


def lambda_at_i_pi(params):
    """Common eigenvalue of t(i pi) = t(6 eta)"""
    phi1 = scalar_functions(params).phi1
    return complex(
        (1 - 2 * np.exp(-params.eps) * np.sinh(params.eta))
        * np.trace(k_right(params, 1j * np.pi))
        * np.prod([phi1(1j * np.pi - t) for t in params.theta])
    )


def asymptotic_coefficient(params):
    """c with Lambda(u) ~ c exp(-6(N+1) eta) exp((2N+2) u) as Re u -> +infinity

    The same c governs Re u -> -infinity through crossing symmetry.
    """
    n = params.n_sites
    twist = params.sigma_r - params.sigma_l - 2j * params.eta
    return complex(0.5 ** (2 * n) * np.exp(-params.eps - params.eps_prime) * (1 + 2 * np.cos(twist)))


class IdentityReport:
    """Residuals of one algebraic identity over a set of points"""

    def __init__(self, which, points, residuals):
        self.which = which
        self.points = [tuple(complex(x) for x in p) for p in points]
        self.residuals = [float(r) for r in residuals]

    def __repr__(self):
        return f"<IdentityReport {self.which} max residual {self.max_residual:.2e} over {len(self.residuals)} points>"

    @property
    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else 0.0

    def passed(self, tol) -> bool:
        return self.max_residual < tol


def _relative(lhs, rhs):
    scale = max(np.max(np.abs(lhs)), np.max(np.abs(rhs)), 1.0)
    return float(np.max(np.abs(lhs - rhs)) / scale)


def embed(matrix, sites, n_spaces=3):
    """Embeds an operator on C^3 (one site) or C^3 x C^3 (ordered sites) into n_spaces copies"""
    dim = 3 ** n_spaces
    op = matrix.reshape((3,) * (2 * len(sites)))
    full = np.eye(dim, dtype=complex).reshape((3,) * n_spaces + (dim,))
    k = len(sites)
    full = np.tensordot(op, full, axes=(list(range(k, 2 * k)), list(sites)))
    full = np.moveaxis(full, list(range(k)), list(sites))
    return full.reshape(dim, dim)


def _partial_transpose_2(matrix):
    # transpose on the second tensor factor of a 9x9 matrix
    return matrix.reshape(3, 3, 3, 3).transpose(0, 3, 2, 1).reshape(9, 9)


def _check_qybe(params, u1, u2, u3):
    r12 = embed(r_matrix(params, u1 - u2), (0, 1))
    r13 = embed(r_matrix(params, u1 - u3), (0, 2))
    r23 = embed(r_matrix(params, u2 - u3), (1, 2))
    return _relative(r12 @ r13 @ r23, r23 @ r13 @ r12)


def _check_unitarity(params, u):
    phi1 = scalar_functions(params).phi1
    lhs = r_matrix(params, u) @ _P @ r_matrix(params, -u) @ _P
    return _relative(lhs, phi1(u) * _IDENTITY9)


def _check_crossing(params, u):
    v1 = np.kron(crossing_matrix(params), _IDENTITY3)
    crossed = _partial_transpose_2(r_matrix(params, -u + 6 * params.eta + 1j * np.pi))
    return _relative(r_matrix(params, u), v1 @ crossed @ np.linalg.inv(v1))


def _check_pt(params, u):
    r = r_matrix(params, u)
    return _relative(_P @ r @ _P, r.T)


def _check_periodicity(params, u):
    return _relative(r_matrix(params, u + 2j * np.pi), r_matrix(params, u))


def _check_re(params, u, mu):
    k1 = np.kron(k_left(params, u), _IDENTITY3)
    k2 = np.kron(_IDENTITY3, k_left(params, mu))
    lhs = r_matrix(params, u - mu) @ k1 @ (_P @ r_matrix(params, u + mu) @ _P) @ k2
    rhs = k2 @ r_matrix(params, u + mu) @ k1 @ (_P @ r_matrix(params, u - mu) @ _P)
    return _relative(lhs, rhs)


def _check_dual_re(params, u, mu):
    eta = params.eta
    m = m_matrix(params)
    m1, m2 = np.kron(m, _IDENTITY3), np.kron(_IDENTITY3, m)
    m1_inv, m2_inv = np.linalg.inv(m1), np.linalg.inv(m2)
    k1 = np.kron(k_right(params, u), _IDENTITY3)
    k2 = np.kron(_IDENTITY3, k_right(params, mu))
    r21_cross = _P @ r_matrix(params, -u - mu + 12 * eta) @ _P
    lhs = r_matrix(params, mu - u) @ k1 @ m1_inv @ r21_cross @ m1 @ k2
    rhs = k2 @ m2_inv @ r_matrix(params, -u - mu + 12 * eta) @ m2 @ k1 @ (_P @ r_matrix(params, mu - u) @ _P)
    return _relative(lhs, rhs)


_CHECKS = {
    "qybe": _check_qybe,
    "unitarity": _check_unitarity,
    "crossing": _check_crossing,
    "pt": _check_pt,
    "periodicity": _check_periodicity,
    "re": _check_re,
    "dual_re": _check_dual_re,
}


def random_points(rng, arity, count):
    """Spectral parameters drawn from Re u in [-3, 3], Im u in [-pi, pi]"""
    shape = (count, arity)
    return rng.uniform(-3, 3, shape) + 1j * rng.uniform(-np.pi, np.pi, shape)


def verify_identity(which, params, points):
    """Evaluates one algebraic identity at each point

    Residuals are max|LHS - RHS| / max(|LHS|, |RHS|, 1). Nothing is raised for a
    failing identity; the report carries the numbers.

    Args:
        which (str): One of IDENTITIES
        params (ModelParams): Model parameters
        points (list): Tuples of spectral parameters, as many per point as the
            identity takes (see ARITY)

    Returns:
        IdentityReport
    """
    if which not in _CHECKS:
        raise ValueError(f"Unknown identity '{which}', expected one of {', '.join(IDENTITIES)}")
    points = [tuple(np.atleast_1d(p)) for p in points]
    for p in points:
        if len(p) != ARITY[which]:
            raise ValueError(f"'{which}' takes {ARITY[which]} spectral parameters per point, got {len(p)}")

    residuals = [_CHECKS[which](params, *p) for p in points]
    report = IdentityReport(which, points, residuals)
    log.debug("%s: max residual %.3e over %d points", which, report.max_residual, len(points))
    return report
