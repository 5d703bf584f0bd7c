"""Monte Carlo oracle for MI and MMSE.

Samples (X, Y) from the model and averages either (E[X|y] - x)^2 or
ln P(y|x) - ln P(y). The posterior mean and marginal are supplied by the
fastest exact route available for the pair: closed forms for Gaussian/Gaussian,
the Poisson marginal recursion for the negative-exponential prior, atom sums for
discrete priors, and spline tables of quadrature values otherwise.

Each batch owns an independent generator spawned from the seed, so results
are bit-identical for a given (seed, n_samples, batch).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterator, NamedTuple, Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import gammaln, logsumexp

from . import channels, estimate, info
from ._grid import effective_support
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
from .nuisance import NuisanceGaussianParams, mi_with_nuisance, mmse_estimators, mmse_with_without_nuisance

LOG_MIN_EVIDENCE = math.log(estimate.MIN_EVIDENCE)
SKIP_WARN_FRACTION = 1e-3


@dataclass(frozen=True)
class McConfig:
    n_samples: int = 2_000_000
    seed: int = 42
    batch: int = 20

    def __post_init__(self):
        if self.n_samples < 10_000:
            raise ConfigurationError("n_samples must be at least 1e4")
        if self.batch < 2 or self.n_samples % self.batch:
            raise ConfigurationError("batch must be >= 2 and divide n_samples")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer")

    @property
    def batch_size(self) -> int:
        return self.n_samples // self.batch

    def generators(self) -> list[np.random.Generator]:
        return [np.random.default_rng(s) for s in np.random.SeedSequence(self.seed).spawn(self.batch)]


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    stderr: float
    skipped: int = 0
    warning: bool = False

    def __iter__(self) -> Iterator[float]:
        yield self.estimate
        yield self.stderr

    def covers(self, value: float, k: float = 3.0) -> bool:
        return abs(value - self.estimate) <= k * self.stderr + 1e-12


def _combine(batch_sums: list[float], batch_counts: list[int], skipped: int, n: int) -> McEstimate:
    means = np.array(batch_sums) / np.array(batch_counts)
    est = float(np.sum(batch_sums) / np.sum(batch_counts))
    se = float(np.std(means, ddof=1) / math.sqrt(means.size))
    warn = skipped > SKIP_WARN_FRACTION * n
    if warn:
        warnings.warn(f"{skipped} of {n} samples skipped for degenerate evidence", RuntimeWarning)
    return McEstimate(est, se, skipped, warn)


# ---------------------------------------------------------------------------
# sampling


def sample_prior(p, n: int, rng: np.random.Generator) -> np.ndarray:
    if isinstance(p, GaussianPrior):
        return p.mean + math.sqrt(p.var) * rng.standard_normal(n)
    if isinstance(p, NegExpPrior):
        return -p.mean * np.log1p(-rng.random(n))
    if isinstance(p, DiscretePrior):
        return p.atoms[rng.choice(p.atoms.size, size=n, p=p.probs)]
    if isinstance(p, TabulatedPrior):
        return _tabulated_inverse_cdf(p, rng.random(n))
    raise ConfigurationError(f"unsupported prior {type(p).__name__}")


def _tabulated_inverse_cdf(p: TabulatedPrior, u: np.ndarray) -> np.ndarray:
    # exact inverse of the piecewise-linear density's CDF (quadratic on each segment)
    g, d = p.grid, p.density
    h = np.diff(g)
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * h * (d[:-1] + d[1:]))])
    u = u * cdf[-1]
    i = np.clip(np.searchsorted(cdf, u, side="right") - 1, 0, h.size - 1)
    r = u - cdf[i]
    d0, slope = d[i], (d[i + 1] - d[i]) / h[i]
    disc = np.maximum(d0 * d0 + 2 * slope * r, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(np.abs(slope) * h[i] > 1e-12 * np.maximum(d0, 1e-300),
                     2 * r / (d0 + np.sqrt(disc)), r / d0)
    t = np.where(np.isfinite(t), t, 0.0)
    return g[i] + np.clip(t, 0.0, h[i])


# ---------------------------------------------------------------------------
# posterior oracles: y -> (E[X|y], ln P(y))

PosteriorFn = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


def _gauss_gauss(p: GaussianPrior, c: GaussianLinear) -> PosteriorFn:
    var_y = c.a**2 * p.var + c.noise_var
    mean_y = c.a * p.mean + c.b

    def f(y):
        post = p.mean + c.a * p.var / var_y * (y - mean_y)
        logm = -0.5 * (math.log(2 * math.pi * var_y) + (y - mean_y) ** 2 / var_y)
        return post, logm

    return f


def _discrete(p: DiscretePrior, c) -> PosteriorFn:
    def f(y):
        lj = c.logpdf(y[:, None], p.atoms[None, :]) + np.log(p.probs)
        logm = logsumexp(lj, axis=1)
        return np.exp(lj - logm[:, None]) @ p.atoms, logm

    return f


def _poisson_negexp(p: NegExpPrior, c: PoissonLinear) -> PosteriorFn:
    def f(y):
        yi = y.astype(np.int64)
        logp = channels.poisson_log_marginal(p.mean, c.a, c.b, int(yi.max()) + 2)
        post = ((yi + 1) * np.exp(logp[yi + 1] - logp[yi]) - c.b) / c.a
        return post, logp[yi]

    return f


def _tabulated_poisson(p, c: PoissonLinear, cfg: QuadConfig) -> PosteriorFn:
    def f(y):
        yi = y.astype(np.int64)
        table = np.arange(int(yi.max()) + 1, dtype=float)
        mean, _, log_ev = estimate._posterior_moments(p, c, table, cfg)
        return mean[yi], log_ev[yi]

    return f


def _spline(p, c: GaussianLinear, cfg: QuadConfig, n_table: int = 4001) -> PosteriorFn:
    lo_x, hi_x = effective_support(p, cfg)
    m_lo, m_hi = sorted((c.a * lo_x + c.b, c.a * hi_x + c.b))
    h = cfg.support_halfwidth_sigmas * c.noise_sd
    yt = np.linspace(m_lo - h, m_hi + h, n_table)
    mean, _, log_ev = estimate._posterior_moments(p, c, yt, cfg)
    s_mean, s_log = CubicSpline(yt, mean), CubicSpline(yt, log_ev)

    def f(y):
        post, logm = s_mean(y), s_log(y)
        out = (y < yt[0]) | (y > yt[-1])
        if np.any(out):
            mo, _, lo = estimate._posterior_moments(p, c, y[out], cfg)
            post[out], logm[out] = mo, lo
        return post, logm

    return f


def posterior_oracle(p, c, cfg: QuadConfig = QuadConfig()) -> PosteriorFn:
    if isinstance(p, DiscretePrior):
        return _discrete(p, c)
    if isinstance(c, PoissonLinear):
        if isinstance(p, NegExpPrior):
            return _poisson_negexp(p, c)
        estimate.check_supported(p, c)
        return _tabulated_poisson(p, c, cfg)
    if isinstance(c, GaussianLinear):
        if isinstance(p, GaussianPrior):
            return _gauss_gauss(p, c)
        return _spline(p, c, cfg)
    raise ConfigurationError(f"unsupported channel {type(c).__name__}")


# ---------------------------------------------------------------------------
# estimators


class McPair(NamedTuple):
    mi: McEstimate
    mmse: McEstimate


def mc_mi_mmse(p, c, mcfg: McConfig = McConfig(), cfg: QuadConfig = QuadConfig()) -> McPair:
    """MI and MMSE estimates from the same sample stream."""
    oracle = posterior_oracle(p, c, cfg)
    sums_mi, sums_se, counts, skipped = [], [], [], 0
    for rng in mcfg.generators():
        x = sample_prior(p, mcfg.batch_size, rng)
        y = c.sample(x, rng).astype(float)
        post, logm = oracle(y)
        ok = logm >= LOG_MIN_EVIDENCE
        skipped += int(np.count_nonzero(~ok))
        sums_mi.append(math.fsum(c.logpdf(y[ok], x[ok]) - logm[ok]))
        sums_se.append(math.fsum((post[ok] - x[ok]) ** 2))
        counts.append(int(np.count_nonzero(ok)))
    n = mcfg.n_samples
    return McPair(_combine(sums_mi, counts, skipped, n), _combine(sums_se, counts, skipped, n))


def mc_mmse(p, c, mcfg: McConfig = McConfig(), cfg: QuadConfig = QuadConfig()) -> McEstimate:
    if isinstance(p, NuisanceGaussianParams):
        return mc_nuisance(p, mcfg).mmse_plus
    return mc_mi_mmse(p, c, mcfg, cfg).mmse


def mc_mi(p, c, mcfg: McConfig = McConfig(), cfg: QuadConfig = QuadConfig()) -> McEstimate:
    if isinstance(p, NuisanceGaussianParams):
        return mc_nuisance(p, mcfg).mi_plus
    return mc_mi_mmse(p, c, mcfg, cfg).mi


class NuisanceMc(NamedTuple):
    mi_plus: McEstimate
    mmse_plus: McEstimate
    mmse_minus: McEstimate


def mc_nuisance(p: NuisanceGaussianParams, mcfg: McConfig = McConfig()) -> NuisanceMc:
    """Sample (U, X, N) triples; score with the closed-form estimators and marginal channel."""
    ch = p.marginal_channel()
    mean_y = p.a * p.x_bar + p.b * p.u_bar
    sums = ([], [], [])
    counts = []
    for rng in mcfg.generators():
        m = mcfg.batch_size
        u = p.u_bar + math.sqrt(p.var_u) * rng.standard_normal(m)
        x = p.alpha * u + math.sqrt(p.var_xu) * rng.standard_normal(m)
        y = p.a * x + p.b * u + math.sqrt(p.noise_var) * rng.standard_normal(m)
        xhat_u, xhat = mmse_estimators(p, y, u)
        logm = -0.5 * (math.log(2 * math.pi * p.var_y) + (y - mean_y) ** 2 / p.var_y)
        sums[0].append(math.fsum(ch.logpdf(y, x) - logm))
        sums[1].append(math.fsum((xhat - x) ** 2))
        sums[2].append(math.fsum((xhat_u - x) ** 2))
        counts.append(m)
    n = mcfg.n_samples
    return NuisanceMc(*(_combine(s, counts, 0, n) for s in sums))


# ---------------------------------------------------------------------------
# concordance corpus


@dataclass(frozen=True)
class Setting:
    name: str
    prior: object
    channel: object = None


def _tent(lo: float, hi: float, n: int = 2001) -> TabulatedPrior:
    g = np.linspace(lo, hi, n)
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    d = np.maximum(half - np.abs(g - mid), 0.0) / half**2
    return TabulatedPrior(g, d)


def _uniform(lo: float, hi: float, n: int = 2001) -> TabulatedPrior:
    g = np.linspace(lo, hi, n)
    return TabulatedPrior(g, np.full(n, 1.0 / (hi - lo)))


def concordance_corpus() -> list[Setting]:
    """Twenty model settings; each contributes one MI and one MMSE check."""
    g = math.sqrt
    return [
        Setting("gauss snr=0.1", GaussianPrior(0.0, 1.0), GaussianLinear(g(0.1), 0.0, 1.0)),
        Setting("gauss snr=1", GaussianPrior(0.0, 1.0), GaussianLinear(1.0, 0.0, 1.0)),
        Setting("gauss snr=3", GaussianPrior(1.0, 1.0), GaussianLinear(g(3.0), 2.0, 1.0)),
        Setting("gauss snr=10", GaussianPrior(-1.0, 2.0), GaussianLinear(1.0, 0.5, 0.2)),
        Setting("gauss a=0", GaussianPrior(0.0, 1.0), GaussianLinear(0.0, 0.0, 1.0)),
        Setting("poisson ax=0.5 b=0", NegExpPrior(1.0), PoissonLinear(0.5, 0.0)),
        Setting("poisson ax=1 b=0", NegExpPrior(1.0), PoissonLinear(1.0, 0.0)),
        Setting("poisson ax=10 b=0", NegExpPrior(1.0), PoissonLinear(10.0, 0.0)),
        Setting("poisson ax=40 b=0 xbar=2", NegExpPrior(2.0), PoissonLinear(20.0, 0.0)),
        Setting("poisson ax=5 b=1", NegExpPrior(1.0), PoissonLinear(5.0, 1.0)),
        Setting("poisson ax=10 b=50", NegExpPrior(1.0), PoissonLinear(10.0, 50.0)),
        Setting("poisson ax=20 b=100", NegExpPrior(1.0), PoissonLinear(20.0, 100.0)),
        Setting("poisson ax=2 b=2 xbar=0.5", NegExpPrior(0.5), PoissonLinear(4.0, 2.0)),
        Setting("negexp/gauss", NegExpPrior(1.0), GaussianLinear(1.0, 0.0, 1.0)),
        Setting("negexp/gauss low noise", NegExpPrior(2.0), GaussianLinear(0.5, 0.3, 0.1)),
        Setting("tent/gauss", _tent(0.0, 2.0), GaussianLinear(1.0, 0.0, 0.25)),
        Setting("uniform/gauss", _uniform(-1.0, 1.0), GaussianLinear(2.0, 0.0, 1.0)),
        Setting("3-atom/gauss", DiscretePrior(np.array([-1.0, 0.0, 2.0]), np.array([0.3, 0.5, 0.2])),
                GaussianLinear(1.0, 0.0, 0.5)),
        Setting("2-atom/poisson", DiscretePrior(np.array([0.5, 3.0]), np.array([0.6, 0.4])),
                PoissonLinear(2.0, 0.5)),
        Setting("nuisance alpha=1", NuisanceGaussianParams(a=1.0, b=1.0, alpha=1.0, var_xu=0.5, var_u=2.0,
                                                           u_bar=0.3, noise_var=1.0)),
    ]


@dataclass(frozen=True)
class ConcordanceCheck:
    name: str
    quantity: str
    deterministic: float
    estimate: float
    stderr: float

    @property
    def passed(self) -> bool:
        return abs(self.deterministic - self.estimate) <= 3 * self.stderr + 1e-12

    @property
    def z(self) -> float:
        d = abs(self.deterministic - self.estimate)
        return d / self.stderr if self.stderr > 0 else (0.0 if d <= 1e-12 else math.inf)


def deterministic_values(s: Setting, cfg: QuadConfig = QuadConfig()) -> tuple[float, float]:
    if isinstance(s.prior, NuisanceGaussianParams):
        return mi_with_nuisance(s.prior), mmse_with_without_nuisance(s.prior).mmse_plus
    return (info.mutual_information_exact(s.prior, s.channel, cfg),
            estimate.mmse(s.prior, s.channel, cfg))


def run_concordance(mcfg: McConfig = McConfig(), cfg: QuadConfig = QuadConfig(),
                    corpus: Optional[list[Setting]] = None) -> list[ConcordanceCheck]:
    out = []
    for s in corpus if corpus is not None else concordance_corpus():
        mi_det, mmse_det = deterministic_values(s, cfg)
        if isinstance(s.prior, NuisanceGaussianParams):
            r = mc_nuisance(s.prior, mcfg)
            mi_mc, mmse_mc = r.mi_plus, r.mmse_plus
        else:
            mi_mc, mmse_mc = mc_mi_mmse(s.prior, s.channel, mcfg, cfg)
        out.append(ConcordanceCheck(s.name, "mi", mi_det, mi_mc.estimate, mi_mc.stderr))
        out.append(ConcordanceCheck(s.name, "mmse", mmse_det, mmse_mc.estimate, mmse_mc.stderr))
    return out
