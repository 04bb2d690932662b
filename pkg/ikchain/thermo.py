"""Thermodynamic-limit energies from the zero densities

Every energy below is a series sum_{k>=1} g(k) c(k) with the common factor

    g(k) = [(-1)^k e^{-6 eta k} - 1] / [1 + (-1)^k e^{-6 eta k}] = -1 + D(k)

and c(k) a finite sum of geometric terms A r^k. The -1 part is summed in closed
form, the D(k) part term by term up to a cutoff K with the certified tail bound
2 C e^{-6 eta (K+1)} / (1 - e^{-6 eta})^2, C = sum |A|.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from . import zeroes
from .errors import DomainError

log = logging.getLogger(__name__)

SERIES_TOL = 1e-12
MIN_CUTOFF = 50


class KernelBank:
    """The kernels a_n, b_n of the density equations and their Fourier images

    Fourier images use f~(k) = int_{-pi}^{pi} f(u) e^{iku} du on integer k.
    """

    def __init__(self, eta):
        if eta <= 0:
            raise ValueError(f"eta must be positive, not {eta}")
        self.eta = eta

    def __repr__(self):
        return f"<KernelBank eta={self.eta}>"

    def a(self, n, u):
        x = abs(n) * self.eta
        return np.sinh(x) / (2 * np.pi * (np.cosh(x) - np.cos(u)))

    def b(self, n, u):
        x = abs(n) * self.eta
        return np.sin(u) / (2 * np.pi * (np.cosh(x) - np.cos(u)))

    def a_hat(self, n, k):
        return np.exp(-self.eta * abs(n * k))

    def b_hat(self, n, k):
        return np.sign(k) * 1j * np.exp(-self.eta * abs(n * k))


@dataclass(frozen=True)
class SeriesValue:
    """A series sum with the cutoff used and a bound on the omitted tail"""

    value: float
    cutoff: int
    tail_bound: float

    def __float__(self):
        return float(self.value)

    def __add__(self, other):
        if isinstance(other, SeriesValue):
            return SeriesValue(
                self.value + other.value, max(self.cutoff, other.cutoff), self.tail_bound + other.tail_bound
            )
        return SeriesValue(self.value + other, self.cutoff, self.tail_bound)

    __radd__ = __add__


def _decay(x):
    """A r^k term with r = e^{-x}"""
    return [(1.0, np.exp(-x))]


def _alternating(x):
    """(-1)^k e^{-xk}"""
    return [(1.0, -np.exp(-x))]


def _cosine(x, angle):
    """cos(angle k) e^{-xk}"""
    return [(0.5, np.exp(-x + 1j * angle)), (0.5, np.exp(-x - 1j * angle))]


def _scaled(terms, factor):
    return [(factor * a, r) for a, r in terms]


def _cutoff(eta, size, tol):
    q = np.exp(-6 * eta)
    if size == 0:
        return MIN_CUTOFF
    k = np.log(tol * (1 - q) ** 2 / (2 * size)) / np.log(q) - 1
    return max(MIN_CUTOFF, int(np.ceil(k)))


def _tail_bound(eta, size, cutoff):
    q = np.exp(-6 * eta)
    return 2 * size * q ** (cutoff + 1) / (1 - q) ** 2


def kernel_series(terms, eta, tol=SERIES_TOL, cutoff=None):
    """sum_{k>=1} g(k) sum_i A_i r_i^k for geometric terms (A_i, r_i) with |r_i| <= 1

    On |r| = 1 the -1 part takes its Abel value -r/(1-r), which is the limit
    from |r| < 1.

    Raises:
        DomainError: If some r equals 1, where the series diverges
    """
    amplitudes = np.array([a for a, _ in terms], dtype=complex)
    ratios = np.array([r for _, r in terms], dtype=complex)
    if np.any(np.abs(ratios) > 1 + 1e-15):
        raise DomainError("kernel series with a growing term")
    if np.any(np.abs(ratios - 1) < 1e-14):
        raise DomainError("kernel series with a non-decaying term diverges")

    size = float(np.sum(np.abs(amplitudes)))
    cutoff = _cutoff(eta, size, tol) if cutoff is None else cutoff

    closed = -np.sum(amplitudes * ratios / (1 - ratios))
    ks = np.arange(1, cutoff + 1)
    signed_q = (-1.0) ** ks * np.exp(-6 * eta * ks)
    d = 2 * signed_q / (1 + signed_q)
    c = (amplitudes[None, :] * ratios[None, :] ** ks[:, None]).sum(axis=1)
    value = complex(closed + np.sum(d * c))

    log.debug("kernel series: %d terms, cutoff %d", len(terms), cutoff)
    return SeriesValue(value.real, cutoff, _tail_bound(eta, size, cutoff))


def _check_chi(chi):
    if chi < 0:
        raise DomainError(f"boundary parameter chi = {chi} must be non-negative")


def bulk_energy_periodic(eta, tol=SERIES_TOL, cutoff=None):
    """Periodic ground-state energy divided by 2N

    The periodic chain of N sites has E_p = 2N times this value in the
    thermodynamic limit.
    """
    return kernel_series(_decay(4 * eta) + _alternating(6 * eta), eta, tol, cutoff)


def boundary_energy(chi, eta, tol=SERIES_TOL, cutoff=None):
    """e_b(chi), the surface energy carried by one boundary field"""
    _check_chi(chi)
    terms = _decay(abs(eta + chi)) + _alternating(abs(eta - chi))
    return kernel_series(terms, eta, tol, cutoff)


def free_boundary_energy(eta, tol=SERIES_TOL, cutoff=None):
    """e_b0, the surface energy of the two free open ends"""
    # (e^{-6 eta k} - e^{-2 eta k})(1 + (-1)^k) - 2(e^{-5 eta k} + e^{-3 eta k}) cos(pi k / 2)
    terms = (
        _decay(6 * eta) + _alternating(6 * eta)
        + _scaled(_decay(2 * eta) + _alternating(2 * eta), -1.0)
        + _scaled(_cosine(5 * eta, np.pi / 2) + _cosine(3 * eta, np.pi / 2), -2.0)
    )
    series = kernel_series(terms, eta, tol, cutoff)
    return series + np.tanh(eta) + np.tanh(5 * eta)


def inner_pair_correction(chi, eta, tol=SERIES_TOL, cutoff=None):
    """Energy of an inner boundary pair at depth 2 eta + chi < 3 eta

    Added to the regime I form once per inner pair in regimes III, V and VI.
    """
    _check_chi(chi)
    terms = _scaled(_alternating(abs(eta - chi)) + _decay(5 * eta + chi), -1.0)
    series = kernel_series(terms, eta, tol, cutoff)
    return series + 0.5 / np.tanh((5 * eta + chi) / 2) + 0.5 * np.tanh((eta - chi) / 2)


def excitation_energy(chi, eta, tol=SERIES_TOL, cutoff=None):
    """delta e(chi), the energy of the boundary excitation of one boundary

    Raises:
        DomainError: If chi >= 3 eta
    """
    _check_chi(chi)
    if chi >= 3 * eta:
        raise DomainError(f"no boundary excitation in this channel: chi = {chi:.6g} >= 3η = {3 * eta:.6g}")
    terms = (
        _decay(5 * eta + chi)
        + _scaled(_decay(abs(7 * eta - chi)), -1.0)
        + _scaled(_decay(abs(eta + chi)), -1.0)
        + _scaled(_alternating(abs(5 * eta - chi)), -1.0)
    )
    series = kernel_series(terms, eta, tol, cutoff)
    closed = (
        0.5 / np.tanh((7 * eta - chi) / 2)
        + 0.5 / np.tanh((eta + chi) / 2)
        + 0.5 * np.tanh((5 * eta - chi) / 2)
        - 0.5 / np.tanh((5 * eta + chi) / 2)
        - np.tanh((eta - chi) / 2)
    )
    return series + closed


def _extra_bracket(alpha1, beta1, eta):
    """Bare energy of the extra quadruple at +-alpha1 + i beta1, +-(pi - alpha1) - i beta1"""
    a, b = 1j * alpha1, beta1
    value = 0.5 * (
        1 / np.tanh((3 * eta + a - b) / 2)
        + 1 / np.tanh((3 * eta - a - b) / 2)
        + np.tanh((3 * eta - a + b) / 2)
        + np.tanh((3 * eta + a + b) / 2)
    )
    return value.real


def _extra_terms(alpha1, beta1, eta):
    # cos(alpha1 k) [e^{-(beta1 - 3 eta) k} + (-1)^k e^{-(beta1 + 3 eta) k}]
    return _cosine(beta1 - 3 * eta, alpha1) + _cosine(beta1 + 3 * eta, alpha1 + np.pi)


def _check_beta(beta1, eta):
    if beta1 <= 3 * eta:
        raise DomainError(f"extra pair depth beta1 = {beta1:.6g} must exceed 3η = {3 * eta:.6g}")


def cancellation_residual(alpha1, beta1, eta, tol=SERIES_TOL, cutoff=None):
    """Bare extra-pair energy minus the energy of the density it displaces

    The two cancel exactly for every admissible (alpha1, beta1), which is why
    the extra pairs leave no trace in the surface energy.

    Raises:
        DomainError: If beta1 <= 3 eta
    """
    _check_beta(beta1, eta)
    series = kernel_series(_extra_terms(alpha1, beta1, eta), eta, tol, cutoff)
    # The displaced-density sum runs over all k != 0 and is even in k
    return _extra_bracket(alpha1, beta1, eta) - 2 * series.value


def density_fourier(params, k, alpha1, beta1):
    """Fourier image rho~(k) of the regime I bulk zero density, homogeneous chain

    At k = 0 the formula is 0/0; the value returned there is the bulk pair
    count over 2N, which the zero counting fixes. Every energy sum multiplies
    rho~(0) by a vanishing coefficient.
    """
    n, eta = params.n_sites, params.eta
    _check_beta(beta1, eta)
    if k == 0:
        return complex((2 * n - 2) / (2 * n))

    kk = abs(k)
    parity = (-1) ** kk
    chi_plus, chi_minus = params.chi_plus, params.chi_minus

    def e(x):
        return np.exp(-abs(x) * kk)

    numerator = (
        2 * n * (e(4 * eta) + parity * e(6 * eta))
        + e(eta + chi_plus) + e(eta + chi_minus)
        + parity * (e(eta - chi_plus) + e(eta - chi_minus) + e(6 * eta) - e(2 * eta))
        + e(6 * eta) - e(2 * eta)
        - 2 * (e(3 * eta) + e(5 * eta)) * np.cos(np.pi * k / 2)
        - 2 * (e(beta1 - 3 * eta) + parity * e(beta1 + 3 * eta)) * np.cos(alpha1 * k)
    )
    denominator = 2 * n * (e(2 * eta) + parity * e(8 * eta))
    return complex(numerator / denominator)


def _mode_cutoff(rate, scale, tol):
    k = np.log(tol * (1 - np.exp(-rate)) / max(scale, 1.0)) / -rate
    return max(MIN_CUTOFF, int(np.ceil(k)))


def ground_energy_regime1(params, alpha1, beta1, n_sites=None, tol=SERIES_TOL):
    """Regime I ground-state energy from the density, summed mode by mode

    The two-sided sum over k is truncated symmetrically at a cutoff set by the
    slowest decay rate among the density terms.
    """
    if n_sites is not None and n_sites != params.n_sites:
        params = params.replace(n_sites=n_sites)
    eta, n = params.eta, params.n_sites
    _check_beta(beta1, eta)
    regime = zeroes.regime_of(params)
    if regime != "I":
        raise DomainError(f"the regime I density does not describe regime {regime}")

    rates = [2 * eta, beta1 - 3 * eta, abs(eta - params.chi_plus), abs(eta - params.chi_minus)]
    cutoff = _mode_cutoff(min(rates), 4 * n + 12, tol)

    total = 0.0
    for k in range(1, cutoff + 1):
        weight = (-1) ** k * np.exp(-8 * eta * k) - np.exp(-2 * eta * k)
        # rho~ is even in k
        total += 2 * n * weight * density_fourier(params, k, alpha1, beta1).real
    log.debug("regime I ground energy summed to |k| = %d", cutoff)
    return float(total + _extra_bracket(alpha1, beta1, eta) + np.tanh(eta) + np.tanh(5 * eta))


@dataclass(frozen=True)
class Excitation:
    """One entry of the boundary excitation menu"""

    label: str
    channels: tuple
    admissible: bool
    note: str = ""


def excitation_menu(params):
    """Boundary excitations of the regime of params

    Regimes II and III offer one channel per boundary, regimes IV to VI also
    the two-boundary combination. A channel with chi >= 3 eta is listed but
    flagged as not admissible.
    """
    regime = zeroes.regime_of(params)
    if regime == "I":
        return []

    eta = params.eta
    open_channel = {"+": params.chi_plus < 3 * eta, "-": params.chi_minus < 3 * eta}

    def entry(channels):
        label = " + ".join(f"δe(χ{c})" for c in channels)
        ok = all(open_channel[c] for c in channels)
        return Excitation(label, tuple(channels), ok, "" if ok else "requires χ < 3η")

    menu = [entry(("+",)), entry(("-",))]
    if regime in ("IV", "V", "VI"):
        menu.append(entry(("+", "-")))
    return menu


@dataclass(frozen=True)
class ThermoReport:
    """Surface energy with its pieces, the bulk energy and the excitation energies"""

    regime: str
    e_bulk_per_site: float
    surface_energy: float
    breakdown: dict
    excitations: list = field(default_factory=list)
    cutoff: int = 0
    tail_bound: float = 0.0

    def __repr__(self):
        return f"<ThermoReport regime {self.regime} E_b={self.surface_energy:.10g}>"

    def to_dict(self) -> dict:
        return {
            "regime": self.regime,
            "e_bulk_per_site": self.e_bulk_per_site,
            "surface_energy": self.surface_energy,
            "breakdown": dict(self.breakdown),
            "excitations": [[label, value] for label, value in self.excitations],
            "truncation": {"cutoff": self.cutoff, "tail_bound": self.tail_bound},
        }


def surface_energy(params, tol=SERIES_TOL):
    """Surface energy E_b = E_g - E_p of the regime of params

    Regimes I, II and IV share the additive form e_b(chi+) + e_b(chi-) + e_b0.
    Regime III adds one inner-pair correction at chi1 = min(chi+, chi-);
    regimes V and VI add a second one at chi2 = max(chi+, chi-). The twist
    angles do not enter.

    Returns:
        ThermoReport
    """
    eta = params.eta
    regime = zeroes.regime_of(params)
    pieces = {
        "e_b(chi+)": boundary_energy(params.chi_plus, eta, tol),
        "e_b(chi-)": boundary_energy(params.chi_minus, eta, tol),
        "e_b0": free_boundary_energy(eta, tol),
    }
    if regime in ("III", "V", "VI"):
        pieces["inner(chi1)"] = inner_pair_correction(params.chi_min, eta, tol)
    if regime in ("V", "VI"):
        pieces["inner(chi2)"] = inner_pair_correction(params.chi_max, eta, tol)

    total = sum(pieces.values(), SeriesValue(0.0, 0, 0.0))
    bulk = bulk_energy_periodic(eta, tol)

    excitations = []
    for item in excitation_menu(params):
        if item.admissible:
            chis = [params.chi_plus if c == "+" else params.chi_minus for c in item.channels]
            excitations.append((item.label, float(sum(excitation_energy(chi, eta, tol).value for chi in chis))))

    return ThermoReport(
        regime=regime,
        e_bulk_per_site=float(bulk),
        surface_energy=float(total),
        breakdown={name: float(value) for name, value in pieces.items()},
        excitations=excitations,
        cutoff=max(total.cutoff, bulk.cutoff),
        tail_bound=total.tail_bound + bulk.tail_bound,
    )


def extrapolate_in_inverse_size(sizes, values, order=2):
    """Extrapolates finite-size values to N -> infinity with a polynomial in 1/N

    The uncertainty is the spread of the intercept between the fit of the
    requested order and the fit one order lower.

    Returns:
        tuple: (intercept, uncertainty)

    Raises:
        ValueError: With fewer than 3 sizes
    """
    sizes = np.asarray(sizes, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(sizes) < 3:
        raise ValueError(f"need ≥ 3 sizes to extrapolate, got {len(sizes)}")
    if len(sizes) != len(values):
        raise ValueError(f"Got {len(sizes)} sizes but {len(values)} values")

    x = 1 / sizes
    order = min(order, len(sizes) - 1)
    intercept = np.polyval(np.polyfit(x, values, order), 0.0)
    lower = np.polyval(np.polyfit(x, values, order - 1), 0.0)
    return float(intercept), float(abs(intercept - lower))
