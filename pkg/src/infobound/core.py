"""Domain types: priors, channels, numerical configuration and result records."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.special import gammaln

LOG_2PI = math.log(2.0 * math.pi)


class InfoboundError(Exception):
    """Base class for library errors."""


class DomainError(InfoboundError, ValueError):
    """Argument outside the domain of a density, rate or special function."""


class ConfigurationError(InfoboundError, ValueError):
    """Unsupported combination of prior, channel or settings."""


class QuadratureError(InfoboundError, ArithmeticError):
    """Integrand produced a non-finite value."""


class SeriesError(InfoboundError, ArithmeticError):
    """Infinite series failed to meet its truncation rule."""


class BracketError(InfoboundError, ValueError):
    """Root-finding interval does not bracket a sign change."""


class DegenerateEvidenceError(InfoboundError, ArithmeticError):
    """Marginal probability of an observation underflowed."""


class DivergenceError(InfoboundError, ArithmeticError):
    """A divergence is infinite because of a support mismatch."""


# ---------------------------------------------------------------------------
# numerical configuration


@dataclass(frozen=True)
class QuadConfig:
    gauss_nodes: int = 256
    support_halfwidth_sigmas: float = 12.0
    series_tail_mass: float = 1e-12
    root_tol: float = 1e-9
    fd_step_rel: float = 1e-5
    panel_nodes: int = 16
    """Gauss-Legendre nodes per panel when an interval is split into panels."""

    def __post_init__(self):
        for name in ("gauss_nodes", "support_halfwidth_sigmas", "series_tail_mass",
                     "root_tol", "fd_step_rel", "panel_nodes"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"QuadConfig.{name} must be positive")
        if not self.series_tail_mass < 1e-6:
            raise ConfigurationError("QuadConfig.series_tail_mass must be < 1e-6")

    @property
    def base_panels(self) -> int:
        """Panel count that reproduces ``gauss_nodes`` nodes on an interval."""
        return max(1, self.gauss_nodes // self.panel_nodes)


# ---------------------------------------------------------------------------
# priors


@dataclass(frozen=True)
class GaussianPrior:
    mean: float
    var: float

    def __post_init__(self):
        if not self.var > 0:
            raise DomainError("Gaussian prior variance must be positive")

    def variance(self) -> float:
        return self.var

    def second_moment(self) -> float:
        return self.var + self.mean**2

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(-0.5 * (x - self.mean) ** 2 / self.var) / math.sqrt(2 * math.pi * self.var)

    def support(self, cfg: QuadConfig) -> tuple[float, float]:
        h = cfg.support_halfwidth_sigmas * math.sqrt(self.var)
        return self.mean - h, self.mean + h


@dataclass(frozen=True)
class NegExpPrior:
    mean: float

    def __post_init__(self):
        if not self.mean > 0:
            raise DomainError("negative-exponential prior mean must be positive")

    def variance(self) -> float:
        return self.mean**2

    def second_moment(self) -> float:
        return 2.0 * self.mean**2

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = x >= 0
        return np.where(inside, np.exp(-np.where(inside, x, 0.0) / self.mean) / self.mean, 0.0)

    def support(self, cfg: QuadConfig) -> tuple[float, float]:
        return 0.0, 60.0 * self.mean


@dataclass(frozen=True, eq=False)
class TabulatedPrior:
    """Piecewise-linear density on a strictly increasing grid."""

    grid: np.ndarray
    density: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        dens = np.asarray(self.density, dtype=float)
        if grid.ndim != 1 or grid.shape != dens.shape or grid.size < 2:
            raise DomainError("tabulated prior needs matching 1-D grid and density, length >= 2")
        if np.any(np.diff(grid) <= 0):
            raise DomainError("tabulated grid must be strictly increasing")
        if np.any(dens < 0):
            raise DomainError("tabulated density must be nonnegative")
        mass = float(np.trapezoid(dens, grid))
        if abs(mass - 1.0) > 1e-9:
            raise DomainError(f"tabulated density integrates to {mass!r}, not 1")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "density", dens)

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid weights times density: E[f(X)] ~ sum(weights * f(grid))."""
        dx = np.diff(self.grid)
        w = np.zeros_like(self.grid)
        w[:-1] += 0.5 * dx
        w[1:] += 0.5 * dx
        return w * self.density

    @property
    def mean(self) -> float:
        return float(np.sum(self.weights * self.grid))

    def variance(self) -> float:
        return float(np.sum(self.weights * (self.grid - self.mean) ** 2))

    def second_moment(self) -> float:
        return float(np.sum(self.weights * self.grid**2))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        if np.any((x < self.grid[0]) | (x > self.grid[-1])):
            raise DomainError("query outside tabulated prior grid")
        return np.interp(x, self.grid, self.density)

    def support(self, cfg: QuadConfig) -> tuple[float, float]:
        return float(self.grid[0]), float(self.grid[-1])


@dataclass(frozen=True, eq=False)
class DiscretePrior:
    """Finite set of atoms with probabilities (discrete-input channels)."""

    atoms: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        atoms = np.atleast_1d(np.asarray(self.atoms, dtype=float))
        probs = np.atleast_1d(np.asarray(self.probs, dtype=float))
        if atoms.shape != probs.shape or atoms.ndim != 1:
            raise DomainError("atoms and probs must be matching 1-D arrays")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
            raise DomainError("probs must be a probability vector")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "probs", probs)

    @property
    def mean(self) -> float:
        return float(np.sum(self.probs * self.atoms))

    def variance(self) -> float:
        return float(np.sum(self.probs * (self.atoms - self.mean) ** 2))

    def second_moment(self) -> float:
        return float(np.sum(self.probs * self.atoms**2))

    def support(self, cfg: QuadConfig) -> tuple[float, float]:
        return float(self.atoms.min()), float(self.atoms.max())


PriorSpec = Union[GaussianPrior, NegExpPrior, TabulatedPrior, DiscretePrior]
CONTINUOUS_PRIORS = (GaussianPrior, NegExpPrior, TabulatedPrior)


def prior_density(p: PriorSpec, x: float) -> float:
    """Density P(x); zero outside the support of analytic priors."""
    if isinstance(p, DiscretePrior):
        raise ConfigurationError("discrete prior has no density")
    return float(p.pdf(x))


# ---------------------------------------------------------------------------
# channels


@dataclass(frozen=True)
class GaussianLinear:
    """Y = a X + b + N with N ~ N(0, noise_var)."""

    a: float
    b: float
    noise_var: float

    def __post_init__(self):
        if not self.noise_var > 0:
            raise DomainError("noise variance must be positive")

    discrete = False

    @property
    def noise_sd(self) -> float:
        return math.sqrt(self.noise_var)

    def logpdf(self, y, x):
        y = np.asarray(y, dtype=float)
        m = self.a * np.asarray(x, dtype=float) + self.b
        return -0.5 * (LOG_2PI + math.log(self.noise_var)) - 0.5 * (y - m) ** 2 / self.noise_var

    def score(self, y, x):
        m = self.a * np.asarray(x, dtype=float) + self.b
        return self.a * (np.asarray(y, dtype=float) - m) / self.noise_var

    def sample(self, x, rng: np.random.Generator):
        x = np.asarray(x, dtype=float)
        return self.a * x + self.b + self.noise_sd * rng.standard_normal(x.shape)


@dataclass(frozen=True)
class PoissonLinear:
    """Y | x ~ Poisson(a x + b)."""

    a: float
    b: float = 0.0

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError("Poisson gain must be positive")
        if not self.b >= 0:
            raise DomainError("Poisson bias must be nonnegative")

    discrete = True

    def rate(self, x):
        lam = self.a * np.asarray(x, dtype=float) + self.b
        if np.any(lam <= 0):
            raise DomainError("Poisson rate a*x + b must be positive")
        return lam

    def logpdf(self, y, x):
        y = np.asarray(y)
        if np.any(y < 0) or np.any(np.floor(y) != y):
            raise DomainError("Poisson outcome must be a nonnegative integer")
        lam = self.rate(x)
        return y * np.log(lam) - lam - gammaln(y + 1.0)

    def score(self, y, x):
        lam = self.rate(x)
        return self.a * np.asarray(y, dtype=float) / lam - self.a

    def sample(self, x, rng: np.random.Generator):
        return rng.poisson(self.rate(x)).astype(float)


ChannelModel = Union[GaussianLinear, PoissonLinear]


def channel_logpdf(c: ChannelModel, y, x) -> float:
    """ln P(y|x)."""
    return float(c.logpdf(y, x))


def channel_score(c: ChannelModel, y, x) -> float:
    """Analytic d/dx ln P(y|x)."""
    return float(c.score(y, x))


# ---------------------------------------------------------------------------
# results


@dataclass
class InfoReport:
    h_X: float
    mi_exact: float
    mi_second_order: float
    mmse: float
    mi_lower_bound: float
    fi_profile: list[tuple[float, float]] = field(default_factory=list)
    flags: dict[str, bool] = field(default_factory=dict)
