"""Fixed-order Gauss-Legendre quadrature, series truncation, incomplete gamma, bisection."""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import gammaln

from .core import BracketError, DomainError, QuadConfig, QuadratureError, SeriesError

MAX_SERIES_TERMS = 10**7
TERM_RATIO = 1e-16


@lru_cache(maxsize=64)
def _gl_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gl_nodes(lo: float, hi: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre abscissas and weights mapped to [lo, hi]."""
    t, w = _gl_rule(int(n))
    half = 0.5 * (hi - lo)
    return lo + half * (t + 1.0), half * w


def composite_nodes(breaks: Sequence[float], n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre with ``n`` nodes on every panel between consecutive breakpoints."""
    breaks = np.asarray(breaks, dtype=float)
    t, w = _gl_rule(int(n))
    lo, hi = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (hi - lo)
    return (lo + half * (t + 1.0)).ravel(), (half * w).ravel()


def panel_count(width: float, scale: Optional[float], cfg: QuadConfig, cap: int = 256) -> int:
    """Panels needed so each is at most two feature scales wide (never below the base count)."""
    n = cfg.base_panels
    if scale is not None and scale > 0 and math.isfinite(scale):
        n = max(n, math.ceil(width / (2.0 * scale)))
    return min(n, max(cap, cfg.base_panels))


def integrate(f: Callable, lo: float, hi: float, cfg: QuadConfig = QuadConfig()) -> float:
    """Integrate ``f`` over [lo, hi] with ``cfg.gauss_nodes`` Gauss-Legendre nodes.

    ``f`` is called once with the full array of abscissas.
    """
    x, w = gl_nodes(lo, hi, cfg.gauss_nodes)
    fx = np.asarray(f(x), dtype=float)
    bad = ~np.isfinite(fx)
    if np.any(bad):
        xb = float(x[np.argmax(bad)])
        raise QuadratureError(f"integrand is not finite at x={xb!r}")
    return math.fsum(w * fx)


# ---------------------------------------------------------------------------
# series


_STOP_RUN = 8


def _truncation_index(t: np.ndarray, cfg: QuadConfig, mass: Optional[float]) -> Optional[int]:
    a = np.abs(t)
    s = np.cumsum(t)
    ok = a < TERM_RATIO * np.abs(s)
    if mass is not None:
        ok &= s >= mass - cfg.series_tail_mass
    # only stop once the terms are past their largest value
    ok[: int(np.argmax(a)) + 1] = False
    # and only after a run of negligible terms, so an isolated zero cannot end the sum
    run = np.convolve(ok.astype(int), np.ones(_STOP_RUN, dtype=int), "valid") == _STOP_RUN
    idx = np.flatnonzero(run)
    return int(idx[0]) + _STOP_RUN - 1 if idx.size else None


def series_terms(term: Callable[[np.ndarray], np.ndarray], cfg: QuadConfig = QuadConfig(),
                 mass: Optional[float] = None, start: int = 1024) -> np.ndarray:
    """Evaluate ``term`` on 0, 1, 2, ... until the truncation rule fires.

    The rule: the terms are past their peak, the current term is below 1e-16 of
    the running sum and, when ``mass`` is given (probability series), the running
    sum exceeds ``mass - cfg.series_tail_mass``. ``term`` receives an integer
    array and may carry state across indices (it is always called from 0).
    """
    n = max(int(start), 16)
    while True:
        t = np.asarray(term(np.arange(n)), dtype=float)
        if not np.all(np.isfinite(t)):
            raise SeriesError(f"non-finite series term at index {int(np.argmax(~np.isfinite(t)))}")
        k = _truncation_index(t, cfg, mass)
        if k is not None:
            return t[: k + 1]
        if n >= MAX_SERIES_TERMS:
            raise SeriesError(f"series did not converge within {MAX_SERIES_TERMS} terms")
        n = min(2 * n, MAX_SERIES_TERMS)


def sum_series(term: Callable[[np.ndarray], np.ndarray], cfg: QuadConfig = QuadConfig(),
               mass: Optional[float] = None) -> float:
    return math.fsum(series_terms(term, cfg, mass))


# ---------------------------------------------------------------------------
# upper incomplete gamma


def log_exp_partial_sums(n: int, u: float) -> np.ndarray:
    """ln sum_{k<=y} u^k / k! for y = 0..n-1 (the truncated exponential series)."""
    if u < 0:
        raise DomainError("incomplete gamma needs u >= 0")
    if u == 0:
        return np.zeros(n)
    k = np.arange(n, dtype=float)
    return np.logaddexp.accumulate(k * math.log(u) - gammaln(k + 1.0))


def log_upper_gamma_table(n: int, u: float) -> np.ndarray:
    """ln Gamma(y+1, u) for y = 0..n-1 via the exact finite sum.

    Gamma(y+1, u) = y! e^{-u} sum_{k<=y} u^k / k!, accumulated in log space.
    """
    y = np.arange(n, dtype=float)
    return gammaln(y + 1.0) - u + log_exp_partial_sums(n, u)


def _log_q_series(s: float, u: float) -> float:
    # lower regularized P by its power series, then Q = 1 - P
    ap, total, delta = s, 1.0 / s, 1.0 / s
    for _ in range(100000):
        ap += 1.0
        delta *= u / ap
        total += delta
        if abs(delta) < abs(total) * 1e-17:
            break
    else:
        raise SeriesError("incomplete gamma series did not converge")
    log_p = math.log(total) - u + s * math.log(u) - math.lgamma(s)
    return math.log1p(-math.exp(log_p))


def _log_gamma_contfrac(s: float, u: float) -> float:
    # modified Lentz evaluation of the continued fraction for Gamma(s, u)
    tiny = 1e-300
    b = u + 1.0 - s
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 100000):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        d = tiny if abs(d) < tiny else d
        c = b + an / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    else:
        raise SeriesError("incomplete gamma continued fraction did not converge")
    return math.log(h) - u + s * math.log(u)


def log_upper_incomplete_gamma(s: float, u: float) -> float:
    if not s > 0:
        raise DomainError("incomplete gamma needs s > 0")
    if not u >= 0:
        raise DomainError("incomplete gamma needs u >= 0")
    if u == 0:
        return math.lgamma(s)
    if s == math.floor(s) and s <= 1e6:
        return float(log_upper_gamma_table(int(s), u)[-1])
    if u < s + 1.0:
        return math.lgamma(s) + _log_q_series(s, u)
    return _log_gamma_contfrac(s, u)


def upper_incomplete_gamma(s: float, u: float) -> float:
    """Gamma(s, u) = integral of x^{s-1} e^{-x} over [u, inf)."""
    return math.exp(log_upper_incomplete_gamma(s, u))


# ---------------------------------------------------------------------------
# root finding


def find_root_bisect(f: Callable[[float], float], lo: float, hi: float,
                     cfg: QuadConfig = QuadConfig()) -> float:
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if not flo * fhi < 0:
        raise BracketError(f"no sign change on [{lo!r}, {hi!r}]")
    while hi - lo > cfg.root_tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
