"""Solution operators T(t), S_alpha(t), P_alpha(t) as diagonal multipliers.

In the Dirichlet sine basis ``A = (-Delta)^s`` is diagonal with entries
``mu_n = lambda_n^s``, so each operator is a per-mode scalar function of
``mu_n t^alpha``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .spectral import FractionalParams, SpectralField
from .special_fn import DomainError, mittag_leffler, wright


@dataclass(frozen=True, eq=False)
class OperatorStamp:
    """Per-mode multipliers of an operator family at a fixed time."""

    t: float
    params: FractionalParams
    multipliers: np.ndarray
    kind: str = "S"

    def apply(self, field):
        return SpectralField(field.coeffs * self.multipliers, field.basis)


def _check_t(t):
    if t < 0:
        raise DomainError(f"t must be non-negative, got {t}")


def s_stamp(t, basis):
    _check_t(t)
    alpha = basis.params.alpha
    mult = mittag_leffler(alpha, 1.0, -basis.frac_eigenvalues * t ** alpha)
    return OperatorStamp(t, basis.params, np.asarray(mult), "S")


def p_stamp(t, basis):
    _check_t(t)
    alpha = basis.params.alpha
    mult = mittag_leffler(alpha, alpha, -basis.frac_eigenvalues * t ** alpha)
    return OperatorStamp(t, basis.params, np.asarray(mult), "P")


def heat_semigroup(t, field):
    """``T(t) = exp(-t A)``."""
    _check_t(t)
    return SpectralField(field.coeffs * np.exp(-field.basis.frac_eigenvalues * t), field.basis)


def apply_S(t, field):
    """``S_alpha(t) = E_{alpha,1}(-t^alpha A)``; identity at t = 0."""
    return s_stamp(t, field.basis).apply(field)


def apply_P(t, field):
    """``P_alpha(t) = E_{alpha,alpha}(-t^alpha A)``; ``1/Gamma(alpha)`` at t = 0."""
    return p_stamp(t, field.basis).apply(field)


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach its tolerance."""


def subordination_check(alpha, mu, t, quad_nodes=256):
    """Gap between the Wright-weighted heat semigroup and ``E_{alpha,1}``.

    Returns ``|int_0^inf Psi_alpha(sig) exp(-mu sig t^alpha) dsig
    - E_{alpha,1}(-mu t^alpha)|`` with the integral done adaptively;
    ``quad_nodes`` caps the number of subintervals.
    """
    if not (0 < alpha < 1 and mu > 0 and t > 0):
        raise DomainError("need 0 < alpha < 1, mu > 0, t > 0")
    rate = mu * t ** alpha
    val, err = wright_laplace(alpha, rate, quad_nodes=quad_nodes)
    target = mittag_leffler(alpha, 1.0, -rate)
    if err > 1e-8 * max(abs(val), 1e-300) + 1e-12:
        raise QuadratureError(f"subordination integral did not converge (err {err:.2e})")
    return abs(val - target)


def wright_laplace(alpha, z, weight_power=0, quad_nodes=256):
    """``int_0^inf sig^weight_power Psi_alpha(sig) exp(-z sig) dsig`` and its
    error estimate."""
    def integrand(sig):
        return sig ** weight_power * wright(alpha, sig) * math.exp(-z * sig)

    # Psi decays like exp(-c sig^(1/(1-alpha))); the mass sits below ~10
    breaks = [0.0, 1.0, 4.0, 12.0, np.inf]
    total, err = 0.0, 0.0
    with warnings.catch_warnings():
        # roundoff warnings at the 1e-12 level; the error estimate is returned
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for a, b in zip(breaks[:-1], breaks[1:]):
            v, e = integrate.quad(integrand, a, b, limit=quad_nodes, epsabs=1e-14, epsrel=1e-12)
            total += v
            err += e
    return total, err
