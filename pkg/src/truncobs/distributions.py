"""Gaussian primitives and the truncated-then-noised feature densities.

A feature ``f_i`` of class ``c`` is drawn from ``N(mu_i, s_i^2)``, kept only if
``f_i >= tau_i`` and then blurred by additive ``N(0, sigma^2)`` internal noise.
For ``sigma > 0`` the resulting density has the closed form

    N(e; mu, s^2 + sigma^2) * Phi((e - a) / b) / Phi((mu - tau) / s)

with ``a = (tau (s^2 + sigma^2) - sigma^2 mu) / s^2`` and
``b = (sigma / s) sqrt(s^2 + sigma^2)``.  For ``sigma == 0`` it is the plain
lower-truncated normal.  All densities are returned in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr, ndtr

__all__ = [
    "NEG_INF",
    "ClassParams",
    "InternalNoise",
    "DegenerateTruncationError",
    "normal_pdf",
    "normal_logpdf",
    "normal_cdf",
    "normal_logcdf",
    "acceptance_prob",
    "log_acceptance_prob",
    "truncation_coefficients",
    "truncated_noised_logpdf",
]

NEG_INF = -math.inf
_LOG_2PI = math.log(2.0 * math.pi)
# acceptance probabilities below this are treated as an empty support
MIN_ACCEPTANCE = 1e-300


class DegenerateTruncationError(ArithmeticError):
    """A threshold leaves (numerically) no probability mass above it."""


def _check_finite(*values: float) -> None:
    for v in values:
        if not np.all(np.isfinite(v)):
            raise ValueError(f"non-finite input: {v!r}")


@dataclass(frozen=True)
class ClassParams:
    """Independent Gaussian external-source parameters for one class."""

    means: tuple[float, ...]
    stddevs: tuple[float, ...]
    label: int = 0

    def __post_init__(self):
        means = tuple(float(m) for m in np.atleast_1d(self.means))
        stddevs = tuple(float(s) for s in np.atleast_1d(self.stddevs))
        if len(means) == 0 or len(means) != len(stddevs):
            raise ValueError("means and stddevs must be non-empty and of equal length")
        if not all(math.isfinite(m) for m in means):
            raise ValueError("means must be finite")
        if not all(math.isfinite(s) and s > 0 for s in stddevs):
            raise ValueError("stddevs must be finite and strictly positive")
        if self.label not in (0, 1):
            raise ValueError("label must be 0 or 1")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "stddevs", stddevs)

    @property
    def M(self) -> int:
        return len(self.means)


@dataclass(frozen=True)
class InternalNoise:
    """Zero-mean Gaussian processing noise; ``sigma == 0`` is the noiseless observer."""

    sigma: float = 0.0

    def __post_init__(self):
        sigma = float(self.sigma)
        if not (math.isfinite(sigma) and sigma >= 0):
            raise ValueError("internal noise sigma must be finite and >= 0")
        object.__setattr__(self, "sigma", sigma)


def normal_logpdf(x, mu, var):
    """Log density of ``N(mu, var)`` at ``x`` (vectorized)."""
    x = np.asarray(x, dtype=float)
    _check_finite(x, mu, var)
    if np.any(np.asarray(var) <= 0):
        raise ValueError("variance must be positive")
    return -0.5 * (_LOG_2PI + np.log(var) + (x - mu) ** 2 / var)


def normal_pdf(x, mu, var):
    """Density of ``N(mu, var)`` at ``x``."""
    out = np.exp(normal_logpdf(x, mu, var))
    return float(out) if out.ndim == 0 else out


def normal_cdf(x):
    """Standard normal CDF, accurate to ~1e-16 absolute (scipy's erfc-based ndtr)."""
    x = np.asarray(x, dtype=float)
    _check_finite(x)
    out = ndtr(x)
    return float(out) if out.ndim == 0 else out


def normal_logcdf(x):
    """``log Phi(x)``; uses an asymptotic series in the far left tail so it stays finite."""
    x = np.asarray(x, dtype=float)
    out = log_ndtr(x)
    return float(out) if out.ndim == 0 else out


def log_acceptance_prob(params: ClassParams, i: int, tau_i: float) -> float:
    """``log P(f_i >= tau_i | c)``; exactly 0 for the ``-inf`` sentinel."""
    if tau_i == NEG_INF:
        return 0.0
    _check_finite(tau_i)
    return float(log_ndtr((params.means[i] - tau_i) / params.stddevs[i]))


def acceptance_prob(params: ClassParams, i: int, tau_i: float) -> float:
    """Probability that feature ``i`` of this class survives threshold ``tau_i``."""
    if tau_i == NEG_INF:
        return 1.0
    _check_finite(tau_i)
    return float(ndtr((params.means[i] - tau_i) / params.stddevs[i]))


def truncation_coefficients(mu: float, s: float, tau: float, sigma: float) -> tuple[float, float]:
    """Location ``a`` and scale ``b`` of the smoothed step ``Phi((e - a) / b)``."""
    s2 = s * s
    v = sigma * sigma
    a = (tau * (s2 + v) - v * mu) / s2
    b = sigma / s * math.sqrt(s2 + v)
    return a, b


def truncated_noised_logpdf(e, params: ClassParams, i: int, tau_i: float, noise: InternalNoise):
    """Log density of an extracted, internally-noised feature value.

    Parameters
    ----------
    e : float or array
        Observed (post-noise) feature value(s).
    params : ClassParams
        External-source parameters of the class.
    i : int
        Feature index.
    tau_i : float
        Lower threshold, or ``NEG_INF`` for no truncation.
    noise : InternalNoise
        Internal noise; ``sigma == 0`` selects the truncated-normal branch,
        which returns ``-inf`` below the threshold.

    Raises
    ------
    DegenerateTruncationError
        If the acceptance probability underflows ``1e-300``.
    """
    e = np.asarray(e, dtype=float)
    mu, s = params.means[i], params.stddevs[i]
    sigma = noise.sigma
    var_tot = s * s + sigma * sigma

    if tau_i == NEG_INF:
        out = normal_logpdf(e, mu, var_tot)
        return float(out) if out.ndim == 0 else out

    log_acc = log_acceptance_prob(params, i, tau_i)
    if log_acc < math.log(MIN_ACCEPTANCE):
        raise DegenerateTruncationError(
            f"feature {i}: acceptance probability {math.exp(log_acc):.3g} below {MIN_ACCEPTANCE:g} "
            f"(mu={mu}, s={s}, tau={tau_i})"
        )

    if sigma == 0.0:
        out = np.where(e >= tau_i, normal_logpdf(e, mu, s * s) - log_acc, -np.inf)
    else:
        a, b = truncation_coefficients(mu, s, tau_i, sigma)
        # a vanishing sigma underflows b; the infinite argument is the correct step limit
        with np.errstate(divide="ignore", over="ignore"):
            out = normal_logpdf(e, mu, var_tot) + log_ndtr((e - a) / b) - log_acc
    return float(out) if np.ndim(out) == 0 else out
