"""MMSE-based bounds on equivocation and MI, plus the checks that exercise them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import channels, estimate, info
from .core import (
    ConfigurationError,
    DomainError,
    GaussianLinear,
    GaussianPrior,
    InfoReport,
    NegExpPrior,
    PoissonLinear,
    QuadConfig,
)
from .quad import find_root_bisect

_LOG_2PI_E = math.log(2 * math.pi * math.e)


def equivocation_from_mmse(mmse_value: float) -> float:
    """Half ln(2 pi e mmse); -inf when the MMSE vanishes."""
    if mmse_value < 0:
        raise DomainError("MMSE must be nonnegative")
    if mmse_value == 0:
        return -math.inf
    return 0.5 * (_LOG_2PI_E + math.log(mmse_value))


def equivocation_upper_bound(p, c, cfg: QuadConfig = QuadConfig()) -> float:
    """Upper bound on h(X|Y) from the MMSE."""
    return equivocation_from_mmse(estimate.mmse(p, c, cfg))


def mi_lower_bound(p, c, cfg: QuadConfig = QuadConfig()) -> float:
    """h(X) minus the equivocation bound. May be negative; +inf if the MMSE is zero."""
    return info.differential_entropy(p, cfg) - equivocation_upper_bound(p, c, cfg)


def poisson_zero_bias_bound(a_xbar: float, cfg: QuadConfig = QuadConfig()) -> float:
    """Lower bound for the zero-bias Poisson channel with the MMSE taken from the series.

    Depends on a and the prior mean only through their product, so the mean is fixed at 1.
    """
    m = channels.poisson_mmse_series(1.0, a_xbar, 0.0, cfg)
    return 0.5 * (1.0 - math.log(2 * math.pi * m))


def bound_threshold(b_over_xbar: float = 0.0, cfg: QuadConfig = QuadConfig(),
                    bracket: tuple[float, float] = (0.01, 1e3)) -> float:
    """Gain a*xbar at which the Poisson lower bound crosses zero (prior mean fixed at 1)."""

    def f(s):
        return mi_lower_bound(NegExpPrior(1.0), PoissonLinear(s, b_over_xbar), cfg)

    return find_root_bisect(f, bracket[0], bracket[1], cfg)


def bound_threshold_zero_bias(cfg: QuadConfig = QuadConfig()) -> float:
    return find_root_bisect(lambda s: poisson_zero_bias_bound(s, cfg), 1.0, 2.0, cfg)


class DerivativeCheck(NamedTuple):
    derivative: float
    rhs: float

    @property
    def rel_gap(self) -> float:
        return abs(self.derivative - self.rhs) / abs(self.rhs)


def gaussian_mi_snr_derivative_check(var_x: float, a: float, noise_var: float,
                                     cfg: QuadConfig = QuadConfig()) -> DerivativeCheck:
    """Central difference of quadrature MI in SNR against MMSE / (2 var_x).

    The SNR is moved by rescaling the gain; both sides use the generic quadrature,
    not the closed forms.
    """
    if not (var_x > 0 and a > 0 and noise_var > 0):
        raise DomainError("var_x, a and noise_var must be positive")
    prior = GaussianPrior(0.0, var_x)
    snr = a * a * var_x / noise_var
    h = cfg.fd_step_rel * snr

    def mi_at(s):
        gain = math.sqrt(s * noise_var / var_x)
        return info.mutual_information_exact(prior, GaussianLinear(gain, 0.0, noise_var), cfg)

    deriv = (mi_at(snr + h) - mi_at(snr - h)) / (2 * h)
    rhs = estimate.mmse(prior, GaussianLinear(a, 0.0, noise_var), cfg) / (2 * var_x)
    return DerivativeCheck(deriv, rhs)


# ---------------------------------------------------------------------------
# vector input


@dataclass(frozen=True)
class DiagonalGaussianMimo:
    """y_i = gains[i] x_i + n_i with independent zero-mean Gaussian x_i and n_i."""

    gains: tuple[float, ...]
    var_x: tuple[float, ...]
    noise_var: tuple[float, ...]

    def __post_init__(self):
        n = len(self.gains)
        if n == 0 or len(self.var_x) != n or len(self.noise_var) != n:
            raise ConfigurationError("gains, var_x and noise_var need the same nonzero length")
        if min(self.var_x) <= 0 or min(self.noise_var) <= 0:
            raise DomainError("variances must be positive")

    @classmethod
    def from_snrs(cls, snrs: Sequence[float], var_x: float = 1.0, noise_var: float = 1.0):
        gains = tuple(math.sqrt(s * noise_var / var_x) for s in snrs)
        n = len(gains)
        return cls(gains, (var_x,) * n, (noise_var,) * n)

    def components(self):
        for g, vx, vn in zip(self.gains, self.var_x, self.noise_var):
            yield GaussianPrior(0.0, vx), GaussianLinear(g, 0.0, vn)


class MimoBound(NamedTuple):
    bound: float
    exact: float


def mimo_mi_lower_bound(model: DiagonalGaussianMimo, cfg: QuadConfig = QuadConfig()) -> MimoBound:
    """h(X) - (N/2) ln(2 pi e MMSE_avg) with MMSE_avg the mean component MMSE."""
    comps = list(model.components())
    n = len(comps)
    h_x = math.fsum(info.differential_entropy(p) for p, _ in comps)
    mmse_avg = math.fsum(estimate.mmse(p, c, cfg) for p, c in comps) / n
    exact = math.fsum(info.mutual_information_exact(p, c, cfg) for p, c in comps)
    return MimoBound(h_x - n * equivocation_from_mmse(mmse_avg), exact)


# ---------------------------------------------------------------------------


def build_report(p, c, cfg: QuadConfig = QuadConfig(), tol: float = 1e-6) -> InfoReport:
    """Every scalar quantity for one (prior, channel) pair, with inequality flags."""
    h_x = info.differential_entropy(p, cfg)
    mi = info.mutual_information_exact(p, c, cfg)
    m = estimate.mmse(p, c, cfg)
    lb = h_x - equivocation_from_mmse(m)
    mi2 = info.mi_second_order(p, c, cfg)
    prof = info.fi_profile(p, c, cfg).pairs()
    var_x = float(p.variance())
    flags = {
        "mmse_le_prior_variance": m <= var_x + 1e-9,
        "mi_ge_lower_bound": mi >= lb - tol,
        "equivocation_le_bound": h_x - mi <= equivocation_from_mmse(m) + tol,
        "mi_nonnegative": mi >= -1e-9,
    }
    return InfoReport(h_X=h_x, mi_exact=mi, mi_second_order=mi2, mmse=m,
                      mi_lower_bound=lb, fi_profile=prof, flags=flags)


def fig_series_poisson(a_xbar: np.ndarray, b: float, cfg: QuadConfig = QuadConfig()):
    """(mi_exact, mi_lower_bound) along a gain sweep at fixed bias, prior mean 1."""
    mi, lb = [], []
    for s in a_xbar:
        p, c = NegExpPrior(1.0), PoissonLinear(float(s), float(b))
        mi.append(info.mutual_information_exact(p, c, cfg))
        lb.append(mi_lower_bound(p, c, cfg))
    return np.array(mi), np.array(lb)
