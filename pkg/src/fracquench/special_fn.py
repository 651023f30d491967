"""Scalar special functions and discrete fractional calculus.

Gamma, the power kernel ``g_alpha``, two-parameter Mittag-Leffler
functions, the Wright (M-Wright) function, and uniform-grid Caputo and
Riemann-Liouville operators used by the verification suites.

All functions are pure; array arguments are accepted where noted and
evaluated elementwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import betainc, betaln, gammaln, gammasgn, rgamma


class DomainError(ValueError):
    """Argument outside the mathematical domain of a function."""


class PoleError(DomainError):
    """Evaluation at a pole (non-positive integer argument of gamma)."""


@dataclass(frozen=True)
class MLRegimeConfig:
    """Switch radii and resolution for :func:`mittag_leffler`.

    ``series_radius`` bounds the power-series branch, ``asymptotic_radius``
    is the smallest ``|z|`` at which the algebraic expansion is tried and
    ``asymptotic_terms`` the number of terms it keeps. ``quad_nodes`` is the
    trapezoid node count on the half contour used in between.
    """

    series_radius: float = 1.0
    asymptotic_radius: float = 50.0
    asymptotic_terms: int = 10
    quad_nodes: int = 64

    def __post_init__(self):
        if not 0 < self.series_radius <= self.asymptotic_radius:
            raise ValueError("need 0 < series_radius <= asymptotic_radius")
        if self.asymptotic_terms < 2:
            raise ValueError("asymptotic_terms must be >= 2")
        if self.quad_nodes < 16:
            raise ValueError("quad_nodes must be >= 16")


DEFAULT_ML = MLRegimeConfig()

# relative size of the first dropped asymptotic term we accept
_ASYMPTOTIC_GUARD = 1e-13
# parabolic contour s(u) = mu (1 + iu)^2 and its truncation exponent
_CONTOUR_MU = 4.0
_CONTOUR_DECAY = 37.0


def gamma(x):
    """Euler's gamma function; raises :class:`PoleError` at 0, -1, -2, ..."""
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise PoleError(f"gamma has a pole at {x}")
    try:
        return math.gamma(x)
    except OverflowError:
        return math.inf


def g_kernel(alpha, t):
    """Power kernel ``t**(alpha-1)/Gamma(alpha)`` for t > 0, zero otherwise.

    ``g_0`` is identically zero. Accepts array ``t``.
    """
    if alpha < 0:
        raise DomainError("alpha must be >= 0")
    t_arr = np.asarray(t, dtype=float)
    out = np.zeros_like(t_arr)
    if alpha > 0:
        pos = t_arr > 0
        out[pos] = t_arr[pos] ** (alpha - 1.0) * rgamma(alpha)
    return out if out.ndim else float(out)


# {{{ Mittag-Leffler

def _check_ml_params(alpha, beta):
    if not (0 < alpha <= 1):
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")


def _ml_series(alpha, beta, z):
    """Power series; used for |z| <= r0 and for z >= 0 (no cancellation)."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    absz = np.abs(z)
    zmax = float(absz.max()) if z.size else 0.0
    # terms grow until Gamma(beta + alpha n) overtakes |z|^n; cap the count
    # once their log falls 45 below the running maximum
    n_chunk = 64
    n = np.arange(n_chunk, dtype=float)
    logz = np.log(np.where(absz > 0, absz, 1.0))
    total = np.zeros_like(z)
    peak = np.full_like(z, -np.inf)
    start = 0
    while True:
        nn = n + start
        logterm = nn[None, :] * logz[:, None] - gammaln(beta + alpha * nn)[None, :]
        # sign of 1/Gamma for beta + alpha n > 0 is positive
        sign = np.where(z[:, None] < 0, (-1.0) ** nn[None, :], 1.0)
        terms = sign * np.exp(logterm)
        if start == 0:
            terms[absz == 0, 1:] = 0.0
            terms[absz == 0, 0] = rgamma(beta)
        total += terms.sum(axis=1)
        peak = np.maximum(peak, logterm.max(axis=1))
        last = logterm[:, -1]
        done = (last < peak - 45.0) & (np.diff(logterm, axis=1)[:, -1] < 0)
        if np.all(done | (absz == 0)) or start > 20000 + 20 * zmax ** (1.0 / alpha):
            break
        start += n_chunk
    out[...] = total
    return out


def _ml_asymptotic_terms(alpha, beta, z, n_terms):
    """Algebraic expansion -sum_{n=1}^{N-1} z^-n / Gamma(beta - alpha n)
    plus an estimate of the first dropped nonzero term."""
    z = np.asarray(z, dtype=float)
    n = np.arange(1, n_terms + 2, dtype=float)
    coef = rgamma(beta - alpha * n)
    powers = z[:, None] ** (-n[None, :])
    terms = powers * coef[None, :]
    value = -terms[:, : n_terms - 1].sum(axis=1)
    # 1/Gamma vanishes at poles; look at the next two omitted terms
    dropped = np.max(np.abs(terms[:, n_terms - 1:]), axis=1)
    return value, dropped


def _ml_contour(alpha, beta, z, quad_nodes):
    """Trapezoid rule on the parabolic Hankel contour s = mu (1 + iu)^2.

    Real z and conjugate symmetry reduce the Bromwich-type integral to
    (1/pi) * int_0^inf Im[e^s s^(alpha-beta)/(s^alpha - z) s'(u)] du.
    Valid for z <= 0: for alpha < 1 there is no pole on the principal sheet
    and for alpha = 1 the pole s = z lies left of the contour.
    """
    z = np.asarray(z, dtype=float)
    mu = _CONTOUR_MU
    u_max = math.sqrt(1.0 + _CONTOUR_DECAY / mu)
    h = u_max / quad_nodes
    u = h * np.arange(quad_nodes)
    s = mu * (1.0 + 1j * u) ** 2
    ds = 2j * mu * (1.0 + 1j * u)
    weights = np.full(quad_nodes, h / np.pi)
    weights[0] *= 0.5
    kernel = np.exp(s) * s ** (alpha - beta) * ds
    sa = s ** alpha
    vals = (kernel[None, :] / (sa[None, :] - z[:, None])).imag
    return vals @ weights


def mittag_leffler(alpha, beta, z, cfg=None):
    """Two-parameter Mittag-Leffler function ``E_{alpha,beta}(z)`` for real z.

    Requires ``0 < alpha <= 1`` and ``beta > 0``. Accepts array ``z``.

    Branches: the power series for ``|z| <= cfg.series_radius`` and for all
    positive z; the algebraic asymptotic expansion for
    ``z <= -cfg.asymptotic_radius`` when its first dropped term is
    negligible; contour quadrature otherwise. ``E_{1,1}`` is ``exp``.
    """
    cfg = cfg or DEFAULT_ML
    _check_ml_params(alpha, beta)
    z_arr = np.asarray(z, dtype=float)
    flat = z_arr.ravel()
    out = np.empty_like(flat)

    if alpha == 1.0 and beta == 1.0:
        out[:] = np.exp(flat)
        return out.reshape(z_arr.shape) if z_arr.ndim else float(out[0])

    series = (np.abs(flat) <= cfg.series_radius) | (flat > 0)
    rest = ~series
    if np.any(series):
        out[series] = _ml_series(alpha, beta, flat[series])
    if alpha < 1.0:
        asym = rest & (flat <= -cfg.asymptotic_radius)
        if np.any(asym):
            idx = np.flatnonzero(asym)
            value, dropped = _ml_asymptotic_terms(
                alpha, beta, flat[idx], cfg.asymptotic_terms)
            ok = dropped <= _ASYMPTOTIC_GUARD * np.abs(value)
            out[idx[ok]] = value[ok]
            rest[idx[ok]] = False
    if np.any(rest):
        vals = _ml_contour(alpha, beta, flat[rest], cfg.quad_nodes)
        if beta >= alpha:
            # completely monotone on z < 0; keeps round-off from flipping the sign
            vals = np.maximum(vals, 0.0)
        out[rest] = vals
    return out.reshape(z_arr.shape) if z_arr.ndim else float(out[0])


def ml_series_branch(alpha, beta, z):
    """Power-series branch alone (exposed for regime-continuity checks)."""
    _check_ml_params(alpha, beta)
    return float(_ml_series(alpha, beta, np.atleast_1d(float(z)))[0])


def ml_contour_branch(alpha, beta, z, quad_nodes=DEFAULT_ML.quad_nodes):
    """Contour-quadrature branch alone, for z <= 0."""
    _check_ml_params(alpha, beta)
    return float(_ml_contour(alpha, beta, np.atleast_1d(float(z)), quad_nodes)[0])


def ml_asymptotic_branch(alpha, beta, z, n_terms=DEFAULT_ML.asymptotic_terms):
    """Algebraic asymptotic branch alone, for z < 0 and alpha < 1."""
    _check_ml_params(alpha, beta)
    value, _ = _ml_asymptotic_terms(alpha, beta, np.atleast_1d(float(z)), n_terms)
    return float(value[0])


# switch to the small-argument series when mu * t_hi^alpha is below this
_WEIGHT_SERIES_SWITCH = 1e-6


def ml_derivative_weight(alpha, mu, t_lo, t_hi, cfg=None):
    r"""Integral of ``tau^(alpha-1) E_{alpha,alpha}(-mu tau^alpha)`` over
    ``[t_lo, t_hi]``.

    Uses the antiderivative ``-E_{alpha,1}(-mu tau^alpha)/mu``. For
    ``mu * t_hi^alpha`` below 1e-6 the difference quotient cancels, so the
    term-by-term integrated series is summed instead. ``mu`` may be an array.
    """
    if not 0 <= t_lo < t_hi:
        raise DomainError(f"need 0 <= t_lo < t_hi, got [{t_lo}, {t_hi}]")
    mu_arr = np.asarray(mu, dtype=float)
    if np.any(mu_arr < 0):
        raise DomainError("mu must be non-negative")
    flat = mu_arr.ravel()
    out = np.empty_like(flat)
    small = flat * t_hi ** alpha < _WEIGHT_SERIES_SWITCH
    if np.any(small):
        m = flat[small]
        acc = np.zeros_like(m)
        for k in range(4):
            p = alpha * (k + 1)
            acc += (-m) ** k * (t_hi ** p - t_lo ** p) * rgamma(p + 1.0)
        out[small] = acc
    big = ~small
    if np.any(big):
        m = flat[big]
        e_lo = mittag_leffler(alpha, 1.0, -m * t_lo ** alpha, cfg)
        e_hi = mittag_leffler(alpha, 1.0, -m * t_hi ** alpha, cfg)
        out[big] = np.maximum((e_lo - e_hi) / m, 0.0)
    return out.reshape(mu_arr.shape) if mu_arr.ndim else float(out[0])

# }}}


# {{{ Wright function

def _wright_series_terms(alpha, t, n_max):
    """Terms of the defining series, computed in log space, and their logs."""
    n = np.arange(n_max, dtype=float)
    arg = 1.0 - (n + 1.0) * alpha
    pole = (arg <= 0) & (arg == np.floor(arg))
    safe = np.where(pole, 0.5, arg)
    logmag = n * math.log(t) - gammaln(n + 1.0) - gammaln(safe)
    logmag[pole] = -np.inf
    sign = (-1.0) ** n * gammasgn(safe)
    terms = np.where(pole, 0.0, sign * np.exp(np.minimum(logmag, 700.0)))
    return terms, logmag


def _wright_kanter(alpha, t):
    """Zolotarev/Kanter integral of the one-sided stable density, mapped to
    the Wright function; positive integrand on (0, pi)."""
    p = 1.0 / (1.0 - alpha)
    x = t ** p

    def a_fun(phi):
        return (np.sin(alpha * phi) / np.sin(phi)) ** p * np.sin((1.0 - alpha) * phi) / np.sin(alpha * phi)

    def integrand(phi):
        a = a_fun(phi)
        return a * np.exp(-x * a)

    val, _ = integrate.quad(integrand, 0.0, math.pi, epsabs=0.0, epsrel=1e-13, limit=200)
    return t ** (alpha * p) * p / math.pi * val


def wright(alpha, t):
    """Wright function ``Psi_alpha(t) = sum (-t)^n / (n! Gamma(1-(n+1) alpha))``.

    The series is summed while its largest term stays below 1e3 (at most
    ~1e-13 lost to cancellation); beyond that the equivalent positive
    integral over (0, pi) is used. Requires ``0 < alpha < 1``, ``t >= 0``.
    """
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if t < 0:
        raise DomainError(f"t must be non-negative, got {t}")
    t = float(t)
    if t == 0.0:
        return float(rgamma(1.0 - alpha))
    n_max = 400
    terms, logmag = _wright_series_terms(alpha, t, n_max)
    if np.max(logmag) < math.log(1e3) and logmag[-1] < -40.0:
        return float(max(terms.sum(), 0.0))
    return float(_wright_kanter(alpha, t))

# }}}


# {{{ discrete fractional calculus on uniform grids

@dataclass(frozen=True)
class ScalarSeries:
    """Samples ``values[i] = v(origin + i*step)``; NaN marks an absent sample."""

    values: np.ndarray
    step: float
    origin: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise ValueError("ScalarSeries needs at least 2 samples")
        if not self.step > 0:
            raise ValueError("step must be positive")
        if self.origin < 0:
            raise ValueError("origin must be non-negative")
        object.__setattr__(self, "values", vals)

    @property
    def times(self):
        return self.origin + self.step * np.arange(self.values.size)

    @classmethod
    def sample(cls, func, t_end, step, origin=0.0):
        n = int(round((t_end - origin) / step))
        t = origin + step * np.arange(n + 1)
        return cls(np.asarray(func(t), dtype=float), step, origin)


def caputo_scalar(series, alpha):
    """L1 discretisation of the Caputo derivative of order ``alpha`` in (0, 1).

    The piecewise-linear interpolant of the samples is differentiated under
    the kernel exactly. The first output sample is NaN (absent).
    """
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    v = series.values
    if v.size < 3:
        raise ValueError("caputo_scalar needs at least 3 samples")
    n = v.size
    m = np.arange(n, dtype=float)
    b = (m + 1.0) ** (1.0 - alpha) - m ** (1.0 - alpha)
    dv = np.diff(v)
    scale = series.step ** (-alpha) * rgamma(2.0 - alpha)
    out = np.full(n, np.nan)
    # out[k] = scale * sum_{j<k} b[k-1-j] dv[j]
    conv = np.convolve(dv, b)[: n - 1]
    out[1:] = scale * conv
    return ScalarSeries(out, series.step, series.origin)


def rl_integral_scalar(series, alpha, singular_exponent=None, sigma_power=1.0):
    """Riemann-Liouville integral ``J^alpha`` by a product rule.

    By default each cell's integrand is frozen at its right-endpoint sample
    and the kernel ``g_alpha`` is integrated exactly, so the sample at the
    origin is never used (it may be singular). ``J^0`` is the identity.

    If the data are known to behave like ``t^singular_exponent * phi(t)``
    near ``t = 0`` (series starting at the origin), ``phi`` is instead
    interpolated piecewise-quadratically in ``sigma = t^sigma_power`` and
    each ``kernel * t^gamma * sigma^k`` is integrated exactly. The first
    cell extrapolates ``phi`` from the samples at h, 2h, 3h, so the outputs
    at h and 2h look one or two samples ahead. This is much more accurate
    for data such as ``t^(a-1) E_{a,a}(-mu t^a)`` with ``sigma_power = a``.
    """
    if alpha < 0:
        raise DomainError("alpha must be >= 0")
    if alpha == 0:
        return ScalarSeries(series.values.copy(), series.step, series.origin)
    if singular_exponent is not None:
        return _rl_singular(series, alpha, float(singular_exponent), float(sigma_power))
    v = series.values
    n = v.size
    m = np.arange(n, dtype=float)
    moments = series.step ** alpha * ((m + 1.0) ** alpha - m ** alpha) * rgamma(alpha + 1.0)
    out = np.zeros(n)
    # out[k] = sum_{j=1}^{k} moments[k-j] v[j]
    out[1:] = np.convolve(v[1:], moments)[: n - 1]
    return ScalarSeries(out, series.step, series.origin)


def _power_moment(t, lo, hi, order, gam):
    """``int_lo^hi g_order(t - s) s^gam ds`` for ``0 <= lo < hi <= t``."""
    scale = t ** (order + gam) * np.exp(betaln(gam + 1.0, order)) * rgamma(order)
    return scale * (betainc(gam + 1.0, order, hi / t) - betainc(gam + 1.0, order, lo / t))


def _quadratic_in_sigma(sig, phi, first):
    """Coefficients ``c0 + c1 sig + c2 sig^2`` through nodes first..first+2."""
    x0, x1, x2 = sig[first], sig[first + 1], sig[first + 2]
    y0, y1, y2 = phi[first], phi[first + 1], phi[first + 2]
    d01 = (y1 - y0) / (x1 - x0)
    d12 = (y2 - y1) / (x2 - x1)
    c2 = (d12 - d01) / (x2 - x0)
    return np.array([y0 - x0 * d01 + c2 * x0 * x1, d01 - c2 * (x0 + x1), c2])


def _rl_singular(series, alpha, gam, q):
    if series.origin != 0.0:
        raise ValueError("singular mode needs a series starting at t = 0")
    if not gam > -1.0 or not q > 0:
        raise DomainError("need singular_exponent > -1 and sigma_power > 0")
    v = series.values
    n = v.size
    if n < 4:
        raise ValueError("singular mode needs at least 4 samples")
    t = series.step * np.arange(n)
    sig = t ** q
    phi = np.full(n, np.nan)
    phi[1:] = v[1:] / t[1:] ** gam
    # cell j uses nodes j..j+2; the first cell (phi(0) unknown) uses 1..3
    first = np.minimum(np.maximum(np.arange(n - 1), 1), n - 3)
    coef = _quadratic_in_sigma(sig, phi, first)
    out = np.zeros(n)
    for k in range(1, n):
        lo, hi = t[:k], t[1:k + 1]
        ck = coef[:, :k]
        if k >= 3:
            # the last cell must not reach beyond t_k
            ck = ck.copy()
            ck[:, k - 1] = _quadratic_in_sigma(sig, phi, k - 2)
        out[k] = sum(np.dot(_power_moment(t[k], lo, hi, alpha, gam + m * q), ck[m])
                     for m in range(3))
    return ScalarSeries(out, series.step, series.origin)
