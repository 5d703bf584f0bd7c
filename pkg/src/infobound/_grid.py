"""Tensor discretization of (prior, channel) pairs shared by info/estimate/mc.

Prior nodes carry their density in the weights, so E[f(X)] ~ sum(wx * f(x)).
Output nodes carry plain quadrature weights (1 for discrete outputs).
The likelihood is never stored whole: ``likelihood_blocks`` walks it in row
blocks and, for the Gaussian channel, only over the band of x where it is
representable in double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln, logsumexp

from .core import (
    ConfigurationError,
    DiscretePrior,
    GaussianLinear,
    GaussianPrior,
    NegExpPrior,
    PoissonLinear,
    QuadConfig,
    TabulatedPrior,
)
from .quad import composite_nodes, panel_count, series_terms

# decades of geometric grading towards x = 0 for the negative-exponential prior
_NEGEXP_GRADING = 12
# panel cap for fine channels; 4096 panels of 16 nodes is ~65k nodes
_PANEL_CAP = 4096
# beyond 40 noise sds exp(-800) underflows, so those likelihood entries are exactly 0
_BAND_SIGMAS = 40.0
_ROW_BLOCK = 256


def channel_scale(c) -> Optional[float]:
    """Length scale in x over which the likelihood changes appreciably."""
    if isinstance(c, GaussianLinear):
        return c.noise_sd / abs(c.a) if c.a != 0 else None
    if isinstance(c, PoissonLinear):
        return math.sqrt(max(c.b, 1.0)) / c.a
    raise ConfigurationError(f"unsupported channel {type(c).__name__}")


def prior_nodes(p, cfg: QuadConfig, scale: Optional[float] = None) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(p, DiscretePrior):
        return p.atoms.copy(), p.probs.copy()
    if isinstance(p, TabulatedPrior):
        return p.grid.copy(), p.weights
    lo, hi = p.support(cfg)
    if isinstance(p, GaussianPrior):
        n = panel_count(hi - lo, scale, cfg, _PANEL_CAP)
        x, w = composite_nodes(np.linspace(lo, hi, n + 1), cfg.panel_nodes)
        return x, w * p.pdf(x)
    if isinstance(p, NegExpPrior):
        graded = p.mean * np.logspace(-_NEGEXP_GRADING, 0, _NEGEXP_GRADING + 1)
        n = panel_count(hi - p.mean, scale, cfg, _PANEL_CAP)
        breaks = np.concatenate([[0.0], _refine(graded, scale), np.linspace(p.mean, hi, n + 1)[1:]])
        x, w = composite_nodes(breaks, cfg.panel_nodes)
        return x, w * p.pdf(x)
    raise ConfigurationError(f"unsupported prior {type(p).__name__}")


def _refine(breaks: np.ndarray, scale: Optional[float]) -> np.ndarray:
    """Split intervals wider than two channel scales."""
    if scale is None or not scale > 0:
        return breaks
    out = [breaks[:1]]
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        k = max(1, math.ceil((hi - lo) / (2.0 * scale)))
        out.append(np.linspace(lo, hi, k + 1)[1:])
    return np.concatenate(out)


def effective_support(p, cfg: QuadConfig) -> tuple[float, float]:
    """Range holding all but ~1e-18 of the prior mass."""
    if isinstance(p, GaussianPrior):
        h = min(9.0, cfg.support_halfwidth_sigmas) * math.sqrt(p.var)
        return p.mean - h, p.mean + h
    if isinstance(p, NegExpPrior):
        return 0.0, 42.0 * p.mean
    return p.support(cfg)


def likelihood_blocks(c, x: np.ndarray, y: np.ndarray, block: int = _ROW_BLOCK):
    """Yield ``(rows, cols, loglik)`` with ``loglik = ln P(y[rows] | x[cols])``.

    Entries outside the yielded blocks have a likelihood that underflows to zero.
    ``x`` must be sorted for the Gaussian band to be used; otherwise all columns are kept.
    """
    banded = isinstance(c, GaussianLinear) and c.a != 0 and bool(np.all(np.diff(x) >= 0))
    for start in range(0, y.size, block):
        rows = slice(start, min(start + block, y.size))
        yb = y[rows]
        if banded:
            h = _BAND_SIGMAS * c.noise_sd
            lo, hi = sorted(((float(yb.min()) - c.b - h) / c.a, (float(yb.max()) - c.b + h) / c.a))
            cols = slice(int(np.searchsorted(x, lo, "left")), int(np.searchsorted(x, hi, "right")))
        else:
            cols = slice(0, x.size)
        yield rows, cols, c.logpdf(yb[:, None], x[None, cols])


@dataclass(frozen=True)
class Grid:
    x: np.ndarray
    wx: np.ndarray
    y: np.ndarray
    wy: np.ndarray
    channel: object
    discrete: bool

    def blocks(self):
        return likelihood_blocks(self.channel, self.x, self.y)


def output_nodes(c, x: np.ndarray, wx: np.ndarray, lo_hi: tuple[float, float],
                 cfg: QuadConfig) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(c, GaussianLinear):
        m_lo, m_hi = sorted((c.a * lo_hi[0] + c.b, c.a * lo_hi[1] + c.b))
        h = cfg.support_halfwidth_sigmas * c.noise_sd
        lo, hi = m_lo - h, m_hi + h
        n = panel_count(hi - lo, c.noise_sd, cfg, _PANEL_CAP)
        return composite_nodes(np.linspace(lo, hi, n + 1), cfg.panel_nodes)
    if isinstance(c, PoissonLinear):
        lam = c.rate(x)
        log_w = np.log(wx)
        log_lam = np.log(lam)

        def marginal(y):
            yy = y[:, None].astype(float)
            return np.exp(logsumexp(yy * log_lam - lam - gammaln(yy + 1.0) + log_w, axis=1))

        lam_hi = c.a * lo_hi[1] + c.b
        start = int(lam_hi + 12.0 * math.sqrt(lam_hi) + 64)
        total = float(np.sum(wx))
        y = np.arange(series_terms(marginal, cfg, mass=total, start=start).size, dtype=float)
        return y, np.ones_like(y)
    raise ConfigurationError(f"unsupported channel {type(c).__name__}")


def discretize(p, c, cfg: QuadConfig) -> Grid:
    x, wx = prior_nodes(p, cfg, channel_scale(c))
    keep = wx > 0
    x, wx = x[keep], wx[keep] / math.fsum(wx[keep])
    y, wy = output_nodes(c, x, wx, effective_support(p, cfg), cfg)
    return Grid(x, wx, y, wy, c, discrete=isinstance(c, PoissonLinear))
