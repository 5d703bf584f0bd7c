"""Posterior means, MMSE and the added-measurement comparison."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from . import channels
from ._grid import channel_scale, discretize, effective_support, likelihood_blocks, output_nodes, prior_nodes
from .core import (
    ConfigurationError,
    DegenerateEvidenceError,
    DiscretePrior,
    NegExpPrior,
    PoissonLinear,
    QuadConfig,
)

MIN_EVIDENCE = 1e-300


@dataclass(frozen=True)
class PosteriorSummary:
    y: float
    posterior_mean: float
    posterior_variance: float
    evidence: float


def _nodes(p, scale, cfg):
    x, w = prior_nodes(p, cfg, scale)
    keep = w > 0
    return x[keep], w[keep] / math.fsum(w[keep])


def _posterior_moments(p, c, y: np.ndarray, cfg: QuadConfig):
    x, w = _nodes(p, channel_scale(c), cfg)
    y = np.asarray(y, dtype=float)
    mean, var = np.zeros(y.size), np.zeros(y.size)
    log_ev = np.full(y.size, -np.inf)
    for rows, cols, ll in likelihood_blocks(c, x, y):
        if ll.shape[1] == 0:
            continue
        logj = ll + np.log(w[cols])
        log_ev[rows] = logsumexp(logj, axis=1)
        with np.errstate(invalid="ignore"):
            post = np.nan_to_num(np.exp(logj - log_ev[rows, None]))
        xs = x[cols]
        mean[rows] = post @ xs
        var[rows] = np.sum(post * (xs[None, :] - mean[rows, None]) ** 2, axis=1)
    return mean, var, log_ev


def posterior_mean(p, c, y, cfg: QuadConfig = QuadConfig()) -> float:
    """E(X | Y = y) by quadrature over the prior."""
    mean, _, log_ev = _posterior_moments(p, c, np.atleast_1d(float(y)), cfg)
    if log_ev[0] < math.log(MIN_EVIDENCE):
        raise DegenerateEvidenceError(f"P(y={y!r}) underflows")
    return float(mean[0])


def output_grid(p, c, cfg: QuadConfig = QuadConfig()) -> tuple[np.ndarray, np.ndarray]:
    """Output nodes and weights used to average over Y."""
    x, w = _nodes(p, channel_scale(c), cfg)
    return output_nodes(c, x, w, effective_support(p, cfg), cfg)


def posterior_variance_profile(p, c, y_grid: Optional[Sequence[float]] = None,
                               cfg: QuadConfig = QuadConfig()) -> list[PosteriorSummary]:
    if y_grid is None:
        y_grid, _ = output_grid(p, c, cfg)
    y = np.asarray(y_grid, dtype=float)
    mean, var, log_ev = _posterior_moments(p, c, y, cfg)
    if np.any(log_ev < math.log(MIN_EVIDENCE)):
        bad = float(y[np.argmax(log_ev < math.log(MIN_EVIDENCE))])
        raise DegenerateEvidenceError(f"P(y={bad!r}) underflows")
    ev = np.exp(log_ev)
    return [PosteriorSummary(float(a), float(b), float(v), float(e))
            for a, b, v, e in zip(y, mean, var, ev)]


def mmse(p, c, cfg: QuadConfig = QuadConfig()) -> float:
    """E(X^2) - E[E(X|Y)^2]."""
    if isinstance(c, PoissonLinear) and isinstance(p, NegExpPrior):
        return channels.poisson_mmse(p.mean, c.a, c.b, cfg)
    g = discretize(p, c, cfg)
    m2 = math.fsum(g.wx * g.x**2)
    parts = []
    for rows, cols, ll in g.blocks():
        lik = np.exp(ll)
        ev = lik @ g.wx[cols]
        k = lik @ (g.wx[cols] * g.x[cols])
        with np.errstate(divide="ignore", invalid="ignore"):
            sq = np.where(ev > 0, k * k / ev, 0.0)
        parts.append(float(g.wy[rows] @ sq))
    return max(m2 - math.fsum(parts), 0.0)


class MmsePair(NamedTuple):
    single: float
    joint: float


def mmse_two_measurements(p, c1, c2, cfg: QuadConfig = QuadConfig()) -> MmsePair:
    """MMSE from Y alone and from (Y, Z), with Y and Z conditionally independent given X."""
    scales = [s for s in (channel_scale(c1), channel_scale(c2)) if s is not None]
    x, w = _nodes(p, min(scales) if scales else None, cfg)
    lo_hi = effective_support(p, cfg)
    y, wy = output_nodes(c1, x, w, lo_hi, cfg)
    z, wz = output_nodes(c2, x, w, lo_hi, cfg)
    ly = np.exp(c1.logpdf(y[:, None], x[None, :]))
    lz = np.exp(c2.logpdf(z[:, None], x[None, :]))
    m2 = math.fsum(w * x**2)

    ev_y = ly @ w
    k_y = ly @ (w * x)
    with np.errstate(divide="ignore", invalid="ignore"):
        single = m2 - math.fsum(wy * np.where(ev_y > 0, k_y**2 / ev_y, 0.0))

    ev_yz = (ly * w) @ lz.T
    k_yz = (ly * (w * x)) @ lz.T
    with np.errstate(divide="ignore", invalid="ignore"):
        sq = np.where(ev_yz > 0, k_yz**2 / ev_yz, 0.0)
    joint = m2 - float(wy @ sq @ wz)
    return MmsePair(max(single, 0.0), max(joint, 0.0))


def prior_mean_and_variance(p) -> tuple[float, float]:
    if isinstance(p, DiscretePrior):
        return p.mean, p.variance()
    return float(p.mean), float(p.variance())


def check_supported(p, c) -> None:
    if isinstance(c, PoissonLinear) and not isinstance(p, (NegExpPrior, DiscretePrior)):
        raise ConfigurationError("Poisson channel needs a nonnegative prior")
