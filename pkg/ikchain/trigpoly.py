"""Trigonometric (Laurent) polynomials in w = exp((u - center) / 2)

A trigonometric polynomial of u is stored as a finite two-sided polynomial in
w. Fitting from samples, evaluation, differentiation and root extraction all
work on that representation. The module also carries the truncated Taylor
series arithmetic the Bethe ansatz residuals are built from.
"""

import logging

import numpy as np

from .errors import SamplingError

log = logging.getLogger(__name__)

ABS_FLOOR = 1e-13  # relative tolerance floor used for trimming and rank checks
FIT_TOL = 1e-9  # relative least-squares residual above which a fit is rejected
POLISH_TOL = 1e-12  # |p(u*)| target for polished roots, relative to the evaluation scale
POLISH_STEPS = 30


class LaurentPoly:
    """A finite sum of terms c_m * w**m with w = exp((u - center) / 2)

    Exponents run from ``min_exp`` to ``max_exp`` in strides of ``step``. A
    stride of 2 describes polynomials in exp(u - center), which is how the
    transfer-matrix eigenvalues of the open chain are fitted.
    """

    def __init__(self, coeffs, step=1, center=0.0):
        """Creates a Laurent polynomial

        Args:
            coeffs (dict): Map from integer exponent m to complex coefficient c_m
            step (int): Stride between consecutive exponents
            center (complex): Shift of the expansion variable

        Raises:
            ValueError: If coeffs is empty, or an exponent is off the stride
        """
        if not coeffs:
            raise ValueError("A LaurentPoly needs at least one coefficient")
        if int(step) < 1:
            raise ValueError(f"step must be a positive integer, not {step}")

        exps = sorted(int(m) for m in coeffs)
        lo, hi = exps[0], exps[-1]
        if any((m - lo) % step for m in exps):
            raise ValueError(f"Exponents {exps} do not follow a stride of {step}")

        self._step = int(step)
        self._min = lo
        self._center = complex(center)
        self._c = np.zeros((hi - lo) // self._step + 1, dtype=complex)
        for m, c in coeffs.items():
            self._c[(int(m) - lo) // self._step] = c

        self.fit_residual = None  # relative least-squares residual when built by fit_from_samples

    @classmethod
    def _from_array(cls, array, min_exp, step, center):
        poly = cls({min_exp: 1.0}, step, center)
        poly._c = np.asarray(array, dtype=complex).copy()
        return poly

    def __repr__(self):
        return f"<LaurentPoly exponents [{self.min_exp}, {self.max_exp}] step {self.step}>"

    def __call__(self, u):
        return evaluate(self, u)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __mul__(self, other):
        if np.isscalar(other):
            return LaurentPoly._from_array(self._c * other, self._min, self._step, self._center)
        self._check_compatible(other)
        return LaurentPoly._from_array(
            np.convolve(self._c, other._c), self._min + other._min, self._step, self._center
        )

    __rmul__ = __mul__

    def _check_compatible(self, other):
        if self._step != other._step or self._center != other._center:
            raise ValueError("LaurentPoly operands must share step and center")

    def _combine(self, other, sign):
        self._check_compatible(other)
        coeffs = dict(self.coeffs)
        for m, c in other.coeffs.items():
            coeffs[m] = coeffs.get(m, 0.0) + sign * c
        return LaurentPoly(coeffs, self._step, self._center)

    @property
    def coeffs(self) -> dict:
        """Map from exponent to coefficient, zero entries included"""
        return {self._min + i * self._step: complex(c) for i, c in enumerate(self._c)}

    @property
    def min_exp(self) -> int:
        return self._min

    @property
    def max_exp(self) -> int:
        return self._min + (len(self._c) - 1) * self._step

    @property
    def step(self) -> int:
        return self._step

    @property
    def center(self) -> complex:
        return self._center

    @property
    def exponents(self) -> np.ndarray:
        return self._min + self._step * np.arange(len(self._c))

    @property
    def values(self) -> np.ndarray:
        """Coefficients ordered by increasing exponent"""
        return self._c.copy()

    @property
    def scale(self) -> float:
        """Largest coefficient magnitude"""
        return float(np.max(np.abs(self._c)))

    def leading(self) -> complex:
        """Coefficient of the highest exponent"""
        return complex(self._c[-1])

    def trailing(self) -> complex:
        """Coefficient of the lowest exponent"""
        return complex(self._c[0])

    def derivative(self):
        """Returns d/du of the polynomial; each term picks up a factor m / 2"""
        return LaurentPoly._from_array(self._c * self.exponents / 2.0, self._min, self._step, self._center)

    def trimmed(self, tol=ABS_FLOOR):
        """Returns a copy with negligible end coefficients removed

        Args:
            tol (float): Coefficients below tol * scale at either end are dropped
        """
        keep = np.nonzero(np.abs(self._c) > tol * max(self.scale, ABS_FLOOR))[0]
        if keep.size == 0:
            return LaurentPoly({0: 0.0}, self._step, self._center)
        lo, hi = keep[0], keep[-1]
        return LaurentPoly._from_array(self._c[lo:hi + 1], self._min + lo * self._step, self._step, self._center)


def evaluate(p, u):
    """Evaluates a Laurent polynomial at one or more points

    Horner's scheme runs in w over the one-sided part, then the result is shifted
    by w**min_exp.

    Args:
        p (LaurentPoly): The polynomial
        u (complex or array): Evaluation point(s)

    Returns:
        complex or numpy array of complex
    """
    u = np.asarray(u, dtype=complex)
    w = np.exp((u - p.center) / 2.0)
    v = w ** p.step
    acc = np.zeros_like(u)
    for c in p.values[::-1]:
        acc = acc * v + c
    result = acc * w ** p.min_exp
    return complex(result) if result.ndim == 0 else result


def _magnitude(p, u):
    """sum |c_m| |w|**m, the natural scale of p(u) against cancellation"""
    w = abs(np.exp((u - p.center) / 2.0))
    return float(np.sum(np.abs(p.values) * w ** p.exponents.astype(float)))


def fit_from_samples(points, min_exp, max_exp, step=1, center=0.0, tol=FIT_TOL, trim=True, weights=None):
    """Fits a Laurent polynomial through sampled values by least squares

    Args:
        points (list): (u, value) pairs
        min_exp (int): Lowest exponent of the model
        max_exp (int): Highest exponent of the model
        step (int): Exponent stride; 2 models polynomials in exp(u - center)
        center (complex): Shift of the expansion variable
        tol (float): Largest relative residual accepted
        trim (bool): Whether to drop negligible end coefficients afterwards
        weights (array): Optional per-sample row weights

    Returns:
        LaurentPoly: The fitted polynomial, with ``fit_residual`` set

    Raises:
        SamplingError: If the samples cannot determine the model ("degenerate
            sampling") or do not fit it ("model-order mismatch")
    """
    if (max_exp - min_exp) % step:
        raise ValueError(f"Exponent range [{min_exp}, {max_exp}] is not a multiple of step {step}")
    us = np.array([complex(u) for u, _ in points])
    ys = np.array([complex(y) for _, y in points])
    exps = np.arange(min_exp, max_exp + 1, step)
    if len(us) < len(exps):
        raise SamplingError(f"degenerate sampling: {len(us)} samples for {len(exps)} unknown coefficients")

    # Abscissae must be distinct modulo the period of w**step
    v = np.exp(step * (us - center) / 2.0)
    gaps = np.abs(v[:, None] - v[None, :])
    np.fill_diagonal(gaps, np.inf)
    if len(v) > 1 and np.min(gaps) <= ABS_FLOOR * np.max(np.abs(v)):
        raise SamplingError("degenerate sampling: abscissae coincide modulo the period of w")

    w = np.exp((us - center) / 2.0)
    design = w[:, None] ** exps[None, :]
    row_w = np.ones(len(us)) if weights is None else np.asarray(weights, dtype=float)
    design = design * row_w[:, None]
    rhs = ys * row_w
    col_scale = np.max(np.abs(design), axis=0)
    col_scale[col_scale == 0] = 1.0

    sol, _, rank, sv = np.linalg.lstsq(design / col_scale, rhs, rcond=None)
    if rank < len(exps) or sv[-1] <= ABS_FLOOR * sv[0]:
        raise SamplingError(f"degenerate sampling: rank {rank} below {len(exps)} unknowns")
    coeffs = sol / col_scale

    residual = np.linalg.norm(design @ coeffs - rhs) / max(np.linalg.norm(rhs), ABS_FLOOR)
    if residual > tol:
        raise SamplingError(f"model-order mismatch: relative residual {residual:.3e} above {tol:.1e}")

    poly = LaurentPoly._from_array(coeffs, min_exp, step, center)
    if trim:
        poly = poly.trimmed()
    poly.fit_residual = float(residual)
    log.debug("fitted %r with relative residual %.2e", poly, residual)
    return poly


def roots(p, report=False):
    """Finds every root of a Laurent polynomial

    The one-sided polynomial in v = w**step is solved through its companion
    matrix, each root is mapped back to u and polished by Newton iteration on p.
    Stride 1 returns roots with Im(u - center) in (-2*pi, 2*pi], stride 2 in
    (-pi, pi].

    Args:
        p (LaurentPoly): The polynomial
        report (bool): Also return polish residuals and convergence flags

    Returns:
        numpy array of complex roots, or (roots, residuals, converged) if report
    """
    c = p.values
    nonzero = np.nonzero(c)[0]
    if nonzero.size == 0 or nonzero[-1] == nonzero[0]:
        empty = np.zeros(0, dtype=complex)
        return (empty, np.zeros(0), np.zeros(0, dtype=bool)) if report else empty

    # Zero roots of the one-sided polynomial are artefacts of the w**min_exp shift
    one_sided = c[nonzero[0]:nonzero[-1] + 1]
    v_roots = np.roots(one_sided[::-1])
    us = p.center + (2.0 / p.step) * np.log(v_roots.astype(complex))

    dp = p.derivative()
    residuals = np.zeros(len(us))
    converged = np.zeros(len(us), dtype=bool)
    for i, u in enumerate(us):
        us[i], residuals[i], converged[i] = _polish(p, dp, u)
        if not converged[i]:
            log.warning("root %s not polished below tolerance (residual %.2e)", us[i], residuals[i])

    us = _reduce_strip(us, p)
    return (us, residuals, converged) if report else us


def _polish(p, dp, u):
    for _ in range(POLISH_STEPS):
        value = evaluate(p, u)
        scale = max(_magnitude(p, u), ABS_FLOOR)
        if abs(value) < POLISH_TOL * scale:
            return u, abs(value) / scale, True
        slope = evaluate(dp, u)
        if slope == 0:
            break
        u = u - value / slope
    value = evaluate(p, u)
    scale = max(_magnitude(p, u), ABS_FLOOR)
    return u, abs(value) / scale, abs(value) < POLISH_TOL * scale * 1e3


def _reduce_strip(us, p):
    """Maps roots into the fundamental strip of Im(u - center)"""
    half = 2.0 * np.pi / p.step  # half-width of the strip
    shifted = us - p.center
    im = shifted.imag
    im = im - 2 * half * np.floor((im + half) / (2 * half))
    im[im <= -half] += 2 * half
    return p.center + shifted.real + 1j * im


def circle_abscissae(count, center=0.0, offsets=(0.0,), phase=0.37, step=2):
    """Sample points on vertical lines Re u = Re(center) + offset

    Points are equispaced over one period of w**step along each line and shifted
    by ``phase`` of a spacing so they avoid the special points on the real axis.

    Args:
        count (int): Points per line
        center (complex): Expansion center
        offsets (tuple): Real offsets of the lines from the center
        phase (float): Fraction of the spacing by which points are rotated
        step (int): Exponent stride the samples will be fitted with

    Returns:
        numpy array of complex abscissae
    """
    period = 4.0 * np.pi / step
    angles = period * (np.arange(count) + phase) / count
    return np.concatenate([complex(center) + off + 1j * angles for off in offsets])


def line_weights(us, values, center=0.0):
    """Row weights normalizing each sample line by its largest sample

    Used with circle_abscissae so that every line constrains the coefficients it
    resolves best.
    """
    us = np.asarray(us)
    values = np.abs(np.asarray(values))
    lines = np.round((us - center).real, 12)
    weights = np.ones(len(us))
    for line in np.unique(lines):
        mask = lines == line
        weights[mask] = 1.0 / max(values[mask].max(), ABS_FLOOR)
    return weights


# Truncated Taylor series: arrays a with a[k] the coefficient of x**k


def taylor_const(c, order):
    series = np.zeros(order + 1, dtype=complex)
    series[0] = c
    return series


def _affine_powers(a, order):
    # a**k / k! built recursively to avoid overflow
    out = np.empty(order + 1, dtype=complex)
    out[0] = 1.0
    for k in range(1, order + 1):
        out[k] = out[k - 1] * a / k
    return out


def taylor_sinh(a, b, order):
    """Taylor series of sinh(a x + b) in x"""
    series = _affine_powers(a, order)
    series[0::2] *= np.sinh(b)
    series[1::2] *= np.cosh(b)
    return series


def taylor_cosh(a, b, order):
    """Taylor series of cosh(a x + b) in x"""
    series = _affine_powers(a, order)
    series[0::2] *= np.cosh(b)
    series[1::2] *= np.sinh(b)
    return series


def taylor_mul(p, q, order=None):
    order = len(p) - 1 if order is None else order
    return np.convolve(p, q)[:order + 1]


def taylor_product(factors, order):
    result = taylor_const(1.0, order)
    for f in factors:
        result = taylor_mul(result, f, order)
    return result


def taylor_log(f):
    """Taylor series of log f along the last axis of f

    The constant term is the principal logarithm of f[0]. The others follow from
    f' = f (log f)' and carry no branch ambiguity. A vanishing f[0] gives
    non-finite coefficients.
    """
    f = np.asarray(f, dtype=complex)
    g = np.empty_like(f)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        g[..., 0] = np.log(f[..., 0])
        for k in range(1, f.shape[-1]):
            weights = np.arange(1, k)
            acc = np.sum(weights * g[..., 1:k] * f[..., k - 1:0:-1], axis=-1)
            g[..., k] = (f[..., k] - acc / k) / f[..., 0]
    return g


def taylor_reciprocal(f):
    """Taylor series of 1 / f along the last axis of f"""
    f = np.asarray(f, dtype=complex)
    h = np.empty_like(f)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        h[..., 0] = 1.0 / f[..., 0]
        for k in range(1, f.shape[-1]):
            h[..., k] = -np.sum(f[..., 1:k + 1] * h[..., k - 1::-1], axis=-1) / f[..., 0]
    return h


class HyperbolicFactor:
    """offset + weight * f(a u + b) with f either sinh or cosh"""

    def __init__(self, a, b, kind="sinh", offset=0.0, weight=1.0):
        if kind not in ("sinh", "cosh"):
            raise ValueError(f"kind must be 'sinh' or 'cosh', not '{kind}'")
        self.a = complex(a)
        self.b = complex(b)
        self.kind = kind
        self.offset = complex(offset)
        self.weight = complex(weight)

    def __repr__(self):
        return f"<HyperbolicFactor {self.offset} + {self.weight}*{self.kind}({self.a}u + {self.b})>"

    def __call__(self, u):
        f = np.sinh if self.kind == "sinh" else np.cosh
        return self.offset + self.weight * f(self.a * np.asarray(u, dtype=complex) + self.b)

    def series(self, t, order):
        """Taylor series of the factor about u = t"""
        expand = taylor_sinh if self.kind == "sinh" else taylor_cosh
        result = self.weight * expand(self.a, self.a * t + self.b, order)
        result[0] += self.offset
        return result

    def substituted(self, p, q):
        """The same factor as a function of p u + q"""
        return HyperbolicFactor(self.a * p, self.a * q + self.b, self.kind, self.offset, self.weight)


class HyperbolicProduct:
    """A constant times a product of HyperbolicFactor terms

    Every scalar function entering the eigenvalue relations has this shape, so
    one object gives both point values and exact Taylor series.
    """

    def __init__(self, factors=(), scale=1.0):
        self.factors = tuple(factors)
        self.scale = complex(scale)

    def __repr__(self):
        return f"<HyperbolicProduct of {len(self.factors)} factors, scale {self.scale}>"

    def __call__(self, u):
        result = self.scale * np.ones_like(np.asarray(u, dtype=complex))
        for f in self.factors:
            result = result * f(u)
        return complex(result) if result.ndim == 0 else result

    def __mul__(self, other):
        if isinstance(other, HyperbolicProduct):
            return HyperbolicProduct(self.factors + other.factors, self.scale * other.scale)
        return HyperbolicProduct(self.factors, self.scale * other)

    __rmul__ = __mul__

    def series(self, t, order):
        """Taylor coefficients about u = t up to x**order"""
        return self.scale * taylor_product([f.series(t, order) for f in self.factors], order)

    def log_series(self, t, order):
        """Taylor series of the logarithm about u = t, summed over factors

        Returns:
            (series, magnitude): the series, whose constant term uses principal
            logarithms, and the coefficient-wise sum of |log factor| terms
        """
        series = np.zeros(order + 1, dtype=complex)
        magnitude = np.zeros(order + 1)
        if self.factors:
            logs = taylor_log(np.array([f.series(t, order) for f in self.factors]))
            series += logs.sum(axis=0)
            magnitude += np.abs(logs).sum(axis=0)
        series[0] += np.log(self.scale)
        return series, magnitude

    def substituted(self, p, q):
        """The same product as a function of p u + q"""
        return HyperbolicProduct([f.substituted(p, q) for f in self.factors], self.scale)

    def shifted(self, q):
        return self.substituted(1.0, q)
