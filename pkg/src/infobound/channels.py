"""Closed-form results for the Gaussian linear channel and the Poisson channel
with a negative-exponential prior.

For the Poisson case everything depends on the normalized gain ``a * xbar``;
marginal probabilities are handled as logarithms until they are accumulated.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln

from .core import DomainError, InfoboundError, NegExpPrior, QuadConfig
from .quad import log_exp_partial_sums, series_terms


class GaussianClosedForms(NamedTuple):
    mi: float
    mmse: float
    fi: float
    snr: float


def gaussian_closed_forms(var_x: float, a: float, b: float, noise_var: float) -> GaussianClosedForms:
    """Gaussian prior of variance ``var_x`` through Y = aX + b + N."""
    if not (var_x > 0 and noise_var > 0):
        raise DomainError("variances must be positive")
    snr = a * a * var_x / noise_var
    return GaussianClosedForms(
        mi=0.5 * math.log1p(snr),
        mmse=1.0 / (1.0 / var_x + a * a / noise_var),
        fi=a * a / noise_var,
        snr=snr,
    )


# ---------------------------------------------------------------------------
# Poisson channel, negative-exponential prior


def _check_poisson(xbar: float, a: float, b: float) -> None:
    if not xbar > 0:
        raise DomainError("prior mean must be positive")
    if not a > 0:
        raise DomainError("Poisson gain must be positive")
    if not b >= 0:
        raise DomainError("Poisson bias must be nonnegative")


def poisson_log_marginal(xbar: float, a: float, b: float, n: int) -> np.ndarray:
    """ln p(y) for y = 0..n-1.

    p(y) = (s^y / (s+1)^(y+1)) e^{b/s} Gamma(y+1, u) / y!, s = a xbar,
    u = b (s+1)/s. With the finite-sum form of Gamma(y+1, u) the factors
    e^{b/s} e^{-u} collapse to e^{-b} before anything is exponentiated.
    """
    _check_poisson(xbar, a, b)
    s = a * xbar
    y = np.arange(n, dtype=float)
    # y ln(s/(1+s)) with the ratio's log taken as -log1p(1/s): no cancellation at large y
    geometric = -y * math.log1p(1.0 / s) - math.log1p(s)
    if b == 0:
        return geometric
    u = b * (s + 1.0) / s
    return geometric - b + log_exp_partial_sums(n, u)


def poisson_marginal(xbar: float, a: float, b: float, y: int) -> float:
    """Marginal probability p(y) of the Poisson channel under the prior."""
    if y < 0 or int(y) != y:
        raise DomainError("y must be a nonnegative integer")
    return math.exp(float(poisson_log_marginal(xbar, a, b, int(y) + 1)[-1]))


def poisson_marginal_table(xbar: float, a: float, b: float,
                           cfg: QuadConfig = QuadConfig()) -> np.ndarray:
    """p(0), p(1), ... truncated by the probability-series rule."""
    _check_poisson(xbar, a, b)
    start = int(a * xbar * 40 + b + 12 * math.sqrt(b) + 64)
    return series_terms(lambda y: np.exp(poisson_log_marginal(xbar, a, b, y.size)),
                        cfg, mass=1.0, start=start)


def poisson_posterior_mean(xbar: float, a: float, b: float, y) -> np.ndarray:
    """E(X | y) = ((y+1) p(y+1) - b p(y)) / (a p(y))."""
    y = np.asarray(y, dtype=int)
    logp = poisson_log_marginal(xbar, a, b, int(y.max()) + 2)
    ratio = np.exp(logp[y + 1] - logp[y])
    return ((y + 1) * ratio - b) / a


def _mmse_sum(xbar: float, a: float, b: float, cfg: QuadConfig) -> float:
    # sum_y (y+1)^2 p(y+1)^2 / p(y)
    def term(y):
        logp = poisson_log_marginal(xbar, a, b, y.size + 1)
        return np.exp(2.0 * np.log(y + 1.0) + 2.0 * logp[1:] - logp[:-1])

    start = int(a * xbar * 40 + b + 12 * math.sqrt(b) + 64)
    return math.fsum(series_terms(term, cfg, start=start))


def poisson_mmse_series(xbar: float, a: float, b: float, cfg: QuadConfig = QuadConfig()) -> float:
    """MMSE from E(X^2) - sum K(y)^2/p(y) with K(y) rewritten through p(y+1)."""
    _check_poisson(xbar, a, b)
    r = b / a
    return 2.0 * xbar**2 + 2.0 * r * xbar + r * r - _mmse_sum(xbar, a, b, cfg) / (a * a)


def _centered_mmse(xbar: float, a: float, b: float, cfg: QuadConfig) -> float:
    # var(X) - var(E(X|Y)); avoids the (b/a)^2 cancellation of the raw series when b >> a xbar
    def term(y):
        logp = poisson_log_marginal(xbar, a, b, y.size + 1)
        dev = (y + 1.0) * np.exp(logp[1:] - logp[:-1]) - (b + a * xbar)
        return np.exp(logp[:-1]) * dev * dev

    start = int(a * xbar * 40 + b + 12 * math.sqrt(b) + 64)
    return max(xbar**2 - math.fsum(series_terms(term, cfg, start=start)) / (a * a), 0.0)


def poisson_mmse(xbar: float, a: float, b: float, cfg: QuadConfig = QuadConfig()) -> float:
    """MMSE for the negative-exponential prior: closed form at b = 0, centered series otherwise."""
    if b != 0:
        _check_poisson(xbar, a, b)
        return _centered_mmse(xbar, a, b, cfg)
    series = poisson_mmse_series(xbar, a, b, cfg)
    closed = xbar**2 / (1.0 + a * xbar)
    # 2 xbar^2 - sum/a^2 cancels: the relative error grows like (a xbar)^2 * eps
    kappa = 2.0 * (1.0 + a * xbar)
    if abs(series - closed) > (1e-8 + 4e-16 * kappa**2) * closed:
        raise InfoboundError(f"zero-bias MMSE series {series!r} disagrees with {closed!r}")
    return closed


def poisson_mi(xbar: float, a: float, b: float, cfg: QuadConfig = QuadConfig()) -> float:
    """Exact MI: E[(aX+b)(ln(aX+b) - 1)] - sum_y p(y) ln(p(y) y!)."""
    from ._grid import prior_nodes

    _check_poisson(xbar, a, b)
    x, w = prior_nodes(NegExpPrior(xbar), cfg)
    lam = a * x + b
    first = math.fsum(w * lam * (np.log(lam) - 1.0))
    n = poisson_marginal_table(xbar, a, b, cfg).size
    logp = poisson_log_marginal(xbar, a, b, n)
    y = np.arange(n, dtype=float)
    return first - math.fsum(np.exp(logp) * (logp + gammaln(y + 1.0)))
