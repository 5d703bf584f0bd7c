"""Entropy, mutual information, Fisher and Chapman-Robbins information."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import gammaln, logsumexp

from . import channels
from ._grid import Grid, discretize, prior_nodes
from .core import (
    ConfigurationError,
    DiscretePrior,
    DivergenceError,
    GaussianLinear,
    GaussianPrior,
    NegExpPrior,
    PoissonLinear,
    QuadConfig,
    TabulatedPrior,
)
from .quad import composite_nodes, gl_nodes, integrate, series_terms

_LOG_DBL_MAX = math.log(sys.float_info.max)


@dataclass(frozen=True, eq=False)
class FiProfile:
    xs: np.ndarray
    j_values: np.ndarray

    def pairs(self) -> list[tuple[float, float]]:
        return [(float(x), float(j)) for x, j in zip(self.xs, self.j_values)]


def differential_entropy(p, cfg: QuadConfig = QuadConfig()) -> float:
    """h(X) in nats."""
    if isinstance(p, GaussianPrior):
        return 0.5 * math.log(2 * math.pi * math.e * p.var)
    if isinstance(p, NegExpPrior):
        return 1.0 + math.log(p.mean)
    if isinstance(p, TabulatedPrior):
        d = p.density
        with np.errstate(divide="ignore", invalid="ignore"):
            plogp = np.where(d > 0, d * np.log(d), 0.0)
        return -float(np.trapezoid(plogp, p.grid))
    raise ConfigurationError("differential entropy needs a continuous prior")


def entropy_by_quadrature(p, cfg: QuadConfig = QuadConfig()) -> float:
    """-E[ln P(X)] on the prior's quadrature nodes (cross-check for the closed forms)."""
    if not isinstance(p, (GaussianPrior, NegExpPrior)):
        raise ConfigurationError("quadrature entropy is for analytic priors")
    x, w = prior_nodes(p, cfg)
    return -math.fsum(w * np.log(p.pdf(x)))


def _mi_from_grid(g: Grid) -> float:
    # sum_x P(x) KL(P(y|x) || P(y)), computed pointwise to avoid h(Y) - h(Y|X) cancellation
    parts = []
    for rows, cols, ll in g.blocks():
        if ll.shape[1] == 0:
            continue
        logm = logsumexp(ll + np.log(g.wx[cols]), axis=1)
        lik = np.exp(ll)
        with np.errstate(invalid="ignore"):
            kl_terms = np.where(lik > 0, lik * (ll - logm[:, None]), 0.0)
        parts.append(float(g.wy[rows] @ kl_terms @ g.wx[cols]))
    return math.fsum(parts)


def mutual_information_exact(p, c, cfg: QuadConfig = QuadConfig()) -> float:
    """I(X;Y) in nats for a supported (prior, channel) pair."""
    if isinstance(c, PoissonLinear):
        if isinstance(p, NegExpPrior):
            return channels.poisson_mi(p.mean, c.a, c.b, cfg)
        if isinstance(p, DiscretePrior):
            return _mi_from_grid(discretize(p, c, cfg))
        raise ConfigurationError("Poisson channel needs a negative-exponential or discrete prior")
    if isinstance(c, GaussianLinear):
        if c.a == 0:
            return 0.0
        return _mi_from_grid(discretize(p, c, cfg))
    raise ConfigurationError(f"unsupported channel {type(c).__name__}")


def discrete_input_mi(p: DiscretePrior, c, cfg: QuadConfig = QuadConfig()) -> float:
    """Brute force sum_x sum_y p(x) p(y|x) ln(p(y|x)/p(y)) for a finite input alphabet.

    Written independently of the grid machinery: explicit per-atom loops.
    """
    atoms, probs = p.atoms, p.probs
    if isinstance(c, PoissonLinear):
        lam = c.rate(atoms)
        top = lam.max()
        n = int(top + 40 * math.sqrt(top) + 200)
        y = np.arange(n, dtype=float)
        logl = [y * math.log(l) - l - gammaln(y + 1.0) for l in lam]
        log_py = np.full(n, -np.inf)
        for pr, ll in zip(probs, logl):
            if pr > 0:
                log_py = np.logaddexp(log_py, math.log(pr) + ll)
        total = 0.0
        for pr, ll in zip(probs, logl):
            pyx = np.exp(ll)
            mask = pyx > 0
            total += pr * math.fsum(pyx[mask] * (ll[mask] - log_py[mask]))
        return total
    if isinstance(c, GaussianLinear):
        h = 14.0 * c.noise_sd
        rule = QuadConfig(gauss_nodes=32)
        total = 0.0
        for pr, xa in zip(probs, atoms):
            def integrand(y, xa=xa):
                lp = c.logpdf(y, xa)
                py = sum(q * np.exp(c.logpdf(y, xb)) for q, xb in zip(probs, atoms))
                return np.exp(lp) * (lp - np.log(py))

            m = c.a * xa + c.b
            edges = np.linspace(m - h, m + h, 65)
            total += pr * math.fsum(integrate(integrand, lo, hi, rule)
                                    for lo, hi in zip(edges[:-1], edges[1:]))
        return total
    raise ConfigurationError(f"unsupported channel {type(c).__name__}")


# ---------------------------------------------------------------------------
# Fisher information


def _poisson_pmf_terms(lam: float, cfg: QuadConfig) -> np.ndarray:
    start = int(lam + 12 * math.sqrt(lam) + 64)
    return series_terms(lambda y: np.exp(y * math.log(lam) - lam - gammaln(y + 1.0)),
                        cfg, mass=1.0, start=start)


def _gaussian_expectation(c: GaussianLinear, x: float, f, cfg: QuadConfig) -> float:
    m = c.a * x + c.b
    h = cfg.support_halfwidth_sigmas * c.noise_sd
    return integrate(lambda y: np.exp(c.logpdf(y, x)) * f(y), m - h, m + h, cfg)


def fisher_information(c, x: float, cfg: QuadConfig = QuadConfig()) -> float:
    """J(Y|x) = E_{Y|x}[(d ln P(y|x)/dx)^2] by quadrature (continuous) or series (Poisson)."""
    if isinstance(c, GaussianLinear):
        return _gaussian_expectation(c, x, lambda y: c.score(y, x) ** 2, cfg)
    if isinstance(c, PoissonLinear):
        lam = float(c.rate(x))
        pmf = _poisson_pmf_terms(lam, cfg)
        y = np.arange(pmf.size, dtype=float)
        return math.fsum(pmf * c.score(y, x) ** 2)
    raise ConfigurationError(f"unsupported channel {type(c).__name__}")


def fi_profile(p, c, cfg: QuadConfig = QuadConfig(), xs: Optional[Sequence[float]] = None) -> FiProfile:
    """J(Y|x) over ``xs`` (default: nine points spread over the prior)."""
    if xs is None:
        if isinstance(p, GaussianPrior):
            xs = p.mean + math.sqrt(p.var) * np.linspace(-3, 3, 9)
        elif isinstance(p, NegExpPrior):
            xs = p.mean * np.array([0.05, 0.1, 0.25, 0.5, 1, 2, 3, 4, 6])
        elif isinstance(p, TabulatedPrior):
            xs = np.linspace(p.grid[0], p.grid[-1], 9)
        else:
            xs = p.atoms
    xs = np.asarray(xs, dtype=float)
    return FiProfile(xs, np.array([fisher_information(c, float(x), cfg) for x in xs]))


def mi_second_order(p, c, cfg: QuadConfig = QuadConfig()) -> float:
    """Half the prior average of (x - mean)^2 J(Y|x).

    Returns inf when the integral diverges (zero-bias Poisson channel with a
    prior density that is positive at x = 0).
    """
    if isinstance(c, PoissonLinear) and c.b == 0 and isinstance(p, NegExpPrior):
        return math.inf
    if isinstance(p, DiscretePrior):
        x, w = p.atoms, p.probs
    else:
        x, w = prior_nodes(p, cfg)
        keep = w > 0
        x, w = x[keep], w[keep]
    mean = p.mean
    j = np.array([fisher_information(c, float(xi), cfg) for xi in x])
    return 0.5 * math.fsum(w * (x - mean) ** 2 * j)


def fisher_matrix_linear_gaussian(gains: Sequence[float], noise_var: float,
                                  cfg: QuadConfig = QuadConfig()) -> np.ndarray:
    """J_jk = E[s_j s_k] for Y = sum_j g_j x_j + N, by quadrature over the noise."""
    g = np.asarray(gains, dtype=float)
    sd = math.sqrt(noise_var)
    h = cfg.support_halfwidth_sigmas * sd
    n, wn = gl_nodes(-h, h, cfg.gauss_nodes)
    dens = np.exp(-0.5 * n**2 / noise_var) / math.sqrt(2 * math.pi * noise_var)
    s = g[:, None] * n[None, :] / noise_var
    return (s * (wn * dens)) @ s.T


def mi_second_order_mimo(model, cfg: QuadConfig = QuadConfig()) -> float:
    """Multi-input second-order MI for Y = aX + bU + N with independent Gaussian X, U.

    ``model`` is a :class:`~infobound.nuisance.NuisanceGaussianParams` with alpha = 0.
    """
    if model.alpha != 0:
        raise ConfigurationError("MIMO second-order relation needs independent inputs (alpha = 0)")
    J = fisher_matrix_linear_gaussian((model.a, model.b), model.noise_var, cfg)
    px = GaussianPrior(0.0, model.var_xu)
    pu = GaussianPrior(model.u_bar, model.var_u)
    x, wx = prior_nodes(px, cfg)
    u, wu = prior_nodes(pu, cfg)
    dx = (x - px.mean)[:, None]
    du = (u - pu.mean)[None, :]
    quad_form = J[0, 0] * dx**2 + 2 * J[0, 1] * dx * du + J[1, 1] * du**2
    return 0.5 * float(wx @ quad_form @ wu)


# ---------------------------------------------------------------------------
# Chapman-Robbins information


def chapman_robbins_K(c, x: float, x2: float, cfg: QuadConfig = QuadConfig()) -> float:
    """E_{Y|x}[((P(y|x2) - P(y|x)) / P(y|x))^2] = sum/integral P(y|x2)^2/P(y|x) - 1."""
    if x == x2:
        return 0.0
    if isinstance(c, GaussianLinear):
        m1, m2 = c.a * x + c.b, c.a * x2 + c.b
        h = cfg.support_halfwidth_sigmas * c.noise_sd
        centre = 2 * m2 - m1
        lo, hi = min(m1, centre) - h, max(m1, centre) + h
        n = max(cfg.base_panels, math.ceil((hi - lo) / (2 * c.noise_sd)))
        y, w = composite_nodes(np.linspace(lo, hi, n + 1), cfg.panel_nodes)
        lv = 2 * c.logpdf(y, x2) - c.logpdf(y, x)
        shift = float(np.max(lv))
        log_total = shift + math.log(math.fsum(w * np.exp(lv - shift)))
        if log_total > _LOG_DBL_MAX:
            return math.inf
        return max(math.exp(log_total) - 1.0, 0.0)
    if isinstance(c, PoissonLinear):
        lam1 = c.a * x + c.b
        lam2 = c.a * x2 + c.b
        if lam1 <= 0 or lam2 < 0:
            if lam1 <= 0 and lam2 > 0:
                raise DivergenceError("P(y|x) vanishes where P(y|x') does not")
            raise ConfigurationError("Poisson rate must be nonnegative")
        if lam2 == 0:
            # P(y|x2) is a point mass at 0
            return math.exp(lam1) - 1.0

        def log_term(y):
            yf = np.asarray(y, dtype=float)
            return yf * (2 * math.log(lam2) - math.log(lam1)) - 2 * lam2 + lam1 - gammaln(yf + 1.0)

        lam_eff = lam2 * lam2 / lam1
        # scale by the peak term so widely separated rates do not overflow before the sum
        shift = float(log_term(math.floor(lam_eff)))
        start = int(lam_eff + 12 * math.sqrt(lam_eff) + 64)
        terms = series_terms(lambda y: np.exp(log_term(y) - shift), cfg, start=start)
        log_total = shift + math.log(math.fsum(terms))
        if log_total > _LOG_DBL_MAX:
            return math.inf
        return max(math.exp(log_total) - 1.0, 0.0)
    raise ConfigurationError(f"unsupported channel {type(c).__name__}")


def mi_upper_bound_discrete(p: DiscretePrior, c, cfg: QuadConfig = QuadConfig()) -> float:
    """Half the double prior average of the Chapman-Robbins information."""
    atoms, probs = p.atoms, p.probs
    total = 0.0
    for pi, xi in zip(probs, atoms):
        for pj, xj in zip(probs, atoms):
            total += pi * pj * chapman_robbins_K(c, float(xi), float(xj), cfg)
    return 0.5 * total
