"""Correlated two-input Gaussian model Y = aX + bU + N with X | U ~ N(alpha U, var_xu).

"Plus" quantities treat U as a random nuisance; "minus" quantities hold U fixed
and average over its distribution afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import DomainError, GaussianLinear, GaussianPrior


@dataclass(frozen=True)
class NuisanceGaussianParams:
    a: float
    b: float
    alpha: float
    var_xu: float
    var_u: float
    u_bar: float = 0.0
    noise_var: float = 1.0

    def __post_init__(self):
        if not self.var_xu >= 0:
            raise DomainError("var_xu must be nonnegative")
        if not self.var_u > 0:
            raise DomainError("var_u must be positive")
        if not self.noise_var > 0:
            raise DomainError("noise_var must be positive")
        if self.var_xu == 0 and self.alpha == 0:
            raise DomainError("X is degenerate when var_xu = 0 and alpha = 0")

    @classmethod
    def normalized(cls, chi: float, eta: float, snr_u: float) -> "NuisanceGaussianParams":
        """a = b = noise_var = 1, so MMSE comes out in units of noise_var / a^2."""
        return cls(a=1.0, b=1.0, alpha=eta, var_xu=chi, var_u=snr_u, noise_var=1.0)

    # derived quantities

    @property
    def var_x(self) -> float:
        return self.var_xu + self.alpha**2 * self.var_u

    @property
    def x_bar(self) -> float:
        return self.alpha * self.u_bar

    @property
    def var_u_given_x(self) -> float:
        # 1/var_u|x = 1/var_u + alpha^2/var_xu, written to survive var_xu -> 0
        return self.var_u * self.var_xu / self.var_x

    def u_mean_given_x(self, x):
        x = np.asarray(x, dtype=float)
        return (self.var_u * self.alpha * x + self.var_xu * self.u_bar) / self.var_x

    @property
    def chi(self) -> float:
        return self.a**2 * self.var_xu / self.noise_var

    @property
    def eta(self) -> float:
        return self.alpha * self.a / self.b

    @property
    def snr_u(self) -> float:
        return self.b**2 * self.var_u / self.noise_var

    @property
    def var_y(self) -> float:
        return self.noise_var + self.a**2 * self.var_xu + (self.a * self.alpha + self.b) ** 2 * self.var_u

    @property
    def var_y_given_x(self) -> float:
        return self.noise_var + self.b**2 * self.var_u_given_x

    @property
    def marginal_gain(self) -> float:
        """Slope of E(Y|x) once U is integrated out."""
        return self.a + self.alpha * self.b * self.var_u / self.var_x

    @property
    def marginal_offset(self) -> float:
        return self.b * self.u_bar * self.var_xu / self.var_x

    def prior_x(self) -> GaussianPrior:
        return GaussianPrior(self.x_bar, self.var_x)

    def marginal_channel(self) -> GaussianLinear:
        """P(y|x) with the nuisance integrated out: a Gaussian linear channel."""
        return GaussianLinear(self.marginal_gain, self.marginal_offset, self.var_y_given_x)


# ---------------------------------------------------------------------------
# mutual information


def mi_with_nuisance(p: NuisanceGaussianParams) -> float:
    """I(X;Y) with U random."""
    return 0.5 * math.log(p.var_y / p.var_y_given_x)


def mi_without_nuisance(p: NuisanceGaussianParams) -> float:
    """I(X;Y|U): depends on a, var_xu and noise_var only."""
    return 0.5 * math.log1p(p.a**2 * p.var_xu / p.noise_var)


# ---------------------------------------------------------------------------
# MMSE


class MmsePair(NamedTuple):
    mmse_plus: float
    mmse_minus: float


def mmse_with_without_nuisance(p: NuisanceGaussianParams) -> MmsePair:
    a2, s2n, sxu, su = p.a**2, p.noise_var, p.var_xu, p.var_u
    minus = sxu * s2n / (a2 * sxu + s2n)
    num = s2n * sxu + p.alpha**2 * s2n * su + p.b**2 * sxu * su
    plus = num / p.var_y
    return MmsePair(plus, minus)


def mmse_estimators(p: NuisanceGaussianParams, y, u):
    """(E[X | y, u], E[X | y]) as inverse-variance-weighted combinations."""
    y = np.asarray(y, dtype=float)
    u = np.asarray(u, dtype=float)
    if p.var_xu == 0:
        xhat_u = np.broadcast_arrays(p.alpha * u, y)[0].copy()
    else:
        prec_data = p.a**2 / p.noise_var
        prec_prior = 1.0 / p.var_xu
        data_term = p.a * (y - p.b * u) / p.noise_var
        xhat_u = (data_term + p.alpha * u * prec_prior) / (prec_data + prec_prior)
    g, c, v = p.marginal_gain, p.marginal_offset, p.var_y_given_x
    xhat = (g * (y - c) / v + p.x_bar / p.var_x) / (g * g / v + 1.0 / p.var_x)
    return xhat_u, xhat


# ---------------------------------------------------------------------------
# Fisher information


@dataclass(frozen=True, eq=False)
class FiBlock:
    J: np.ndarray
    schur_xx: float
    crb_x: float
    uu_singular: bool


def fi_block_matrix(p: NuisanceGaussianParams, with_prior: bool = False) -> FiBlock:
    """Joint FI of (X, U) from one measurement, optionally plus the prior precision.

    The data-only matrix has rank one, so the Schur complement J_XX - J_XU J_UU^-1 J_UX
    vanishes and the Cramer-Rao bound on X is reported as inf. With J_UU = 0 (b = 0)
    the nuisance decouples and the bound is 1/J_XX.
    """
    ab = np.array([p.a, p.b])
    J = np.outer(ab, ab) / p.noise_var
    if with_prior:
        cov = np.array([[p.var_x, p.alpha * p.var_u], [p.alpha * p.var_u, p.var_u]])
        J = J + np.linalg.inv(cov)
    jxx, jxu, juu = J[0, 0], J[0, 1], J[1, 1]
    uu_singular = juu == 0
    schur = jxx if uu_singular else jxx - jxu * jxu / juu
    # rank-one data matrices leave round-off in the Schur complement
    if abs(schur) <= 1e-12 * max(jxx, 1e-300):
        schur = 0.0
    crb = math.inf if schur <= 0 else 1.0 / schur
    return FiBlock(J, float(schur), crb, bool(uu_singular))


class FiPair(NamedTuple):
    j_plus: float
    j_minus: float


def fi_marginalized_vs_conditional(p: NuisanceGaussianParams) -> FiPair:
    """FI about X with U integrated out (plus) vs U-averaged FI with U known (minus)."""
    if p.alpha != 0:
        raise DomainError("the marginalized-FI inequality needs independent X and U (alpha = 0)")
    j_plus = p.a**2 / (p.noise_var + p.b**2 * p.var_u)
    j_minus = p.a**2 / p.noise_var
    return FiPair(j_plus, j_minus)


# ---------------------------------------------------------------------------
# discrete three-variable model (brute force)


class MiPair(NamedTuple):
    mi_plus: float
    mi_minus: float


def discrete_nuisance_mi(p_xu: np.ndarray, p_y_given_xu: np.ndarray) -> MiPair:
    """I(X;Y) and I(X;Y|U) for finite alphabets by direct summation.

    ``p_xu[i, k]`` is the joint input law; ``p_y_given_xu[i, k, j]`` the channel.
    """
    p_xu = np.asarray(p_xu, dtype=float)
    pyxu = np.asarray(p_y_given_xu, dtype=float)
    joint = p_xu[:, :, None] * pyxu  # x, u, y
    p_xy = joint.sum(axis=1)
    p_x = p_xy.sum(axis=1)
    p_y = p_xy.sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        t_plus = np.where(p_xy > 0, p_xy * np.log(p_xy / np.outer(p_x, p_y)), 0.0)
        p_y_u = joint.sum(axis=0) / p_xu.sum(axis=0)[:, None]  # P(y|u)
        t_minus = np.where(joint > 0, joint * np.log(pyxu / p_y_u[None, :, :]), 0.0)
    return MiPair(float(t_plus.sum()), float(t_minus.sum()))
