"""Named property suites run by ``infobound verify``.

Each check reduces a grid of comparisons to its worst point and records
(lhs, rhs, tolerance, relation) for that point.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass
from typing import Callable, Iterable

import numpy as np

from . import bounds, channels, estimate, figures, info, mc
from .core import DiscretePrior, GaussianLinear, GaussianPrior, NegExpPrior, PoissonLinear, QuadConfig
from .nuisance import (
    NuisanceGaussianParams,
    discrete_nuisance_mi,
    fi_marginalized_vs_conditional,
    mi_with_nuisance,
    mi_without_nuisance,
    mmse_with_without_nuisance,
)


@dataclass(frozen=True)
class Check:
    name: str
    lhs: float
    rhs: float
    tolerance: float
    relation: str  # "==", "<=", ">=", "<", ">"

    @property
    def violation(self) -> float:
        """Positive when the relation fails by more than the tolerance."""
        d = self.lhs - self.rhs
        if self.relation == "==":
            return abs(d) - self.tolerance
        if self.relation in ("<=", "<"):
            return d - self.tolerance
        return -d - self.tolerance

    @property
    def passed(self) -> bool:
        if any(math.isnan(v) for v in (self.lhs, self.rhs)):
            return False
        if self.relation in ("<", ">"):
            return self.violation < 0
        return self.violation <= 0

    def record(self) -> dict:
        out = asdict(self)
        out["pass"] = self.passed
        return out


def worst(name: str, pairs: Iterable[tuple[float, float]], relation: str, tol: float) -> Check:
    checks = [Check(name, float(l), float(r), tol, relation) for l, r in pairs]
    return max(checks, key=lambda c: (not c.passed, c.violation))


# ---------------------------------------------------------------------------
# bounds


def bounds_suite(cfg: QuadConfig = QuadConfig()) -> list[Check]:
    out = []
    root = bounds.bound_threshold_zero_bias(cfg)
    out.append(Check("zero-bias threshold root", root, 2 * math.pi / math.e - 1, 1e-3, "=="))
    out.append(Check("zero-bias bound negative at a*xbar=1", bounds.poisson_zero_bias_bound(1.0, cfg), 0, 0, "<"))
    out.append(Check("zero-bias bound positive at a*xbar=2", bounds.poisson_zero_bias_bound(2.0, cfg), 0, 0, ">"))

    tight, closed = [], []
    for var_x, snr in itertools.product((0.25, 0.5, 1, 2, 4), (0.1, 0.5, 1, 3, 10)):
        p = GaussianPrior(0.0, var_x)
        c = GaussianLinear(math.sqrt(snr / var_x), 0.0, 1.0)
        mi = info.mutual_information_exact(p, c, cfg)
        tight.append((mi, bounds.mi_lower_bound(p, c, cfg)))
        closed.append((mi, 0.5 * math.log1p(snr)))
    out.append(worst("gaussian bound tightness (5x5)", tight, "==", 1e-6))
    out.append(worst("gaussian MI closed form (5x5)", closed, "==", 1e-7))

    deriv = []
    for snr in (0.1, 1, 3, 10):
        d = bounds.gaussian_mi_snr_derivative_check(1.0, math.sqrt(snr), 1.0, cfg)
        deriv.append((d.rel_gap, 0.0))
    out.append(worst("dI/dSNR = MMSE/(2 var_x), relative", deriv, "<=", 1e-4))

    valid = []
    xs = np.geomspace(0.5, 200, 60)
    for b in (0.0, 50.0, 100.0):
        mi, lb = bounds.fig_series_poisson(xs, b, cfg)
        valid.extend(zip(mi, lb))
        if b == 0:
            gap = (mi - lb)[xs >= 5]
            mono = list(zip(np.diff(gap), np.zeros(gap.size - 1)))
    out.append(worst("poisson MI >= lower bound (fig 1 grid)", valid, ">=", 1e-6))
    # with b > 0 the gap has an interior minimum (near a*xbar = 65 for b = 50), so only b = 0 is checked
    out.append(worst("zero-bias bound gap decreasing on [5, 200]", mono, "<", 0))

    fig2 = []
    for s in (5.0, 20.0, 80.0):
        mis = [info.mutual_information_exact(NegExpPrior(1.0), PoissonLinear(s, b), cfg)
               for b in np.linspace(0, 200, 21)]
        fig2.extend(zip(np.diff(mis), np.zeros(20)))
    out.append(worst("poisson MI decreasing in b", fig2, "<", 0))

    p, c = NegExpPrior(1.0), PoissonLinear(10.0, 0.0)
    hxy = info.differential_entropy(p) - info.mutual_information_exact(p, c, cfg)
    out.append(Check("equivocation bound strict, a*xbar=10", bounds.equivocation_upper_bound(p, c, cfg), hxy, 0, ">"))

    sym = bounds.mimo_mi_lower_bound(bounds.DiagonalGaussianMimo.from_snrs([2.0, 2.0]), cfg)
    out.append(Check("MIMO bound tight for equal components", sym.bound, sym.exact, 1e-7, "=="))
    asym = bounds.mimo_mi_lower_bound(bounds.DiagonalGaussianMimo.from_snrs([1.0, 9.0]), cfg)
    out.append(Check("MIMO bound strict for SNR 1 and 9", asym.bound, asym.exact, 0, "<"))
    return out


# ---------------------------------------------------------------------------
# nuisance


def alpha0_grid() -> list[NuisanceGaussianParams]:
    grid = itertools.product((0.5, 1.0, 2.0), (0.3, 1.0, 3.0), (0.5, 1.0, 2.0))
    return [NuisanceGaussianParams(a=a, b=b, alpha=0.0, var_xu=1.0, var_u=vu, noise_var=1.0)
            for a, b, vu in grid]


def random_nuisance_cloud(n: int, seed: int) -> list[NuisanceGaussianParams]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        a, b = rng.uniform(-3, 3, 2)
        out.append(NuisanceGaussianParams(
            a=float(a), b=float(b), alpha=float(rng.uniform(-4, 4)),
            var_xu=float(10 ** rng.uniform(-2, 2)), var_u=float(10 ** rng.uniform(-2, 2)),
            u_bar=float(rng.normal()), noise_var=float(10 ** rng.uniform(-1, 1))))
    return out


def nuisance_suite(cfg: QuadConfig = QuadConfig(), seed: int = 42) -> list[Check]:
    out = []
    eq = []
    for chi, snr_u in itertools.product((0.1, 0.5, 1.0, 2.0, 8.0), (10.0, 100.0)):
        pair = mmse_with_without_nuisance(NuisanceGaussianParams.normalized(chi, chi, snr_u))
        eq.append(pair)
    out.append(worst("mmse equality at chi = eta", eq, "==", 1e-12))

    cloud = [mmse_with_without_nuisance(p) for p in random_nuisance_cloud(1000, seed)]
    out.append(worst("mmse_plus >= mmse_minus (1000 random points)", cloud, ">=", 1e-12))

    grid = alpha0_grid()
    out.append(worst("alpha=0: I- > I+", [(mi_without_nuisance(p), mi_with_nuisance(p)) for p in grid], ">", 0))
    fi = [fi_marginalized_vs_conditional(p) for p in grid]
    out.append(worst("alpha=0: J- >= J+", [(j.j_minus, j.j_plus) for j in fi], ">=", 0))
    p0 = NuisanceGaussianParams(a=1.5, b=0.0, alpha=0.0, var_xu=1.0, var_u=2.0)
    j0 = fi_marginalized_vs_conditional(p0)
    out.append(Check("J- = J+ when b = 0", j0.j_minus, j0.j_plus, 1e-15, "=="))

    decomp = []
    for p in random_nuisance_cloud(200, seed + 1):
        decomp.append((p.var_y, p.var_y_given_x + p.marginal_gain**2 * p.var_x))
    out.append(worst("var_y decomposition", [(l / r, 1.0) for l, r in decomp], "==", 1e-10))

    quad = []
    for p in random_nuisance_cloud(5, seed + 2):
        quad.append((estimate.mmse(p.prior_x(), p.marginal_channel(), cfg), mmse_with_without_nuisance(p).mmse_plus))
    out.append(worst("quadrature MMSE of marginal channel = mmse_plus", quad, "==", 1e-6))

    limit = NuisanceGaussianParams(a=1.0, b=1.0, alpha=1.0, var_xu=0.0, var_u=5.0)
    out.append(Check("var_xu -> 0: I+ > I- = 0", mi_with_nuisance(limit), mi_without_nuisance(limit), 0, ">"))

    interior = []
    table = figures.fig3(figures.Fig3(alpha=(0.5, 1.0, 2.0, 4.0, 8.0)))
    for alpha in (0.5, 1.0, 2.0, 4.0, 8.0):
        rows = [r for r in table.rows if r[0] == "b_over_a" and r[2] == alpha]
        k = int(np.argmax([r[3] for r in rows]))
        interior.append((min(k, len(rows) - 1 - k), 1))
    out.append(worst("fig 3 maximum strictly inside the b/a range", interior, ">=", 0))

    rng = np.random.default_rng(seed)
    p_xu = np.outer([0.5, 0.5], [0.5, 0.5])
    pyxu = rng.dirichlet(np.ones(3), size=(2, 2))
    d = discrete_nuisance_mi(p_xu, pyxu)
    out.append(Check("discrete independent inputs: I- >= I+", d.mi_minus, d.mi_plus, 1e-12, ">="))
    return out


# ---------------------------------------------------------------------------
# oracles


def oracle_suite(cfg: QuadConfig = QuadConfig(), seed: int = 42,
                 mcfg: mc.McConfig | None = None) -> list[Check]:
    out = []
    series = []
    for s, xbar in itertools.product((0.1, 1, 10, 100), (0.5, 1, 5)):
        v = channels.poisson_mmse_series(xbar, s / xbar, 0.0, cfg)
        series.append((v / (xbar**2 / (1 + s)), 1.0))
    out.append(worst("poisson zero-bias MMSE series vs closed form, relative", series, "==", 1e-8))

    second = []
    ratio = []
    for var_x, snr in itertools.product((0.5, 1.0, 2.0), (1e-4, 1e-3, 1e-2, 1.0)):
        p = GaussianPrior(0.0, var_x)
        c = GaussianLinear(math.sqrt(snr / var_x), 0.0, 1.0)
        m2 = info.mi_second_order(p, c, cfg)
        second.append((m2, 0.5 * snr))
        if snr <= 0.01:
            r = info.mutual_information_exact(p, c, cfg) / m2
            ratio.append((r, 1 - 2 * snr))
            ratio.append((1.0, r))
    out.append(worst("second-order MI = SNR/2", second, "==", 1e-9))
    out.append(worst("exact / second-order MI in [1 - 2 SNR, 1]", ratio, ">=", 0))

    cri = []
    inputs = [DiscretePrior(np.array([0.0, 0.3]), np.array([0.5, 0.5])),
              DiscretePrior(np.array([0.0, 1.0, 2.5]), np.array([0.2, 0.5, 0.3])),
              DiscretePrior(np.array([0.5, 3.0]), np.array([0.7, 0.3]))]
    for p, c in itertools.product(inputs, (GaussianLinear(1.0, 0.0, 1.0), PoissonLinear(1.0, 1.0))):
        cri.append((info.mi_upper_bound_discrete(p, c, cfg), info.discrete_input_mi(p, c, cfg)))
    out.append(worst("CRI bound >= discrete-input MI", cri, ">=", 1e-9))

    mono = []
    rng = np.random.default_rng(seed)
    for _ in range(4):
        p = GaussianPrior(float(rng.normal()), float(rng.uniform(0.5, 2)))
        c1 = GaussianLinear(float(rng.uniform(0.2, 2)), 0.0, float(rng.uniform(0.3, 2)))
        c2 = GaussianLinear(float(rng.uniform(0.2, 2)), float(rng.normal()), float(rng.uniform(0.3, 2)))
        pair = estimate.mmse_two_measurements(p, c1, c2, cfg)
        mono.append((pair.joint, pair.single))
    pair = estimate.mmse_two_measurements(NegExpPrior(1.0), PoissonLinear(2.0, 0.5), GaussianLinear(1.0, 0.0, 1.0), cfg)
    mono.append((pair.joint, pair.single))
    out.append(worst("MMSE(Y, Z) <= MMSE(Y)", mono, "<=", 1e-8))

    checks = mc.run_concordance(mcfg or mc.McConfig(seed=seed), cfg)
    n_pass = sum(c.passed for c in checks)
    out.append(Check(f"Monte Carlo within 3 SE ({n_pass}/{len(checks)})", n_pass, 0.95 * len(checks), 0, ">="))
    return out


SUITES: dict[str, Callable[..., list[Check]]] = {
    "bounds": lambda cfg, seed: bounds_suite(cfg),
    "nuisance": lambda cfg, seed: nuisance_suite(cfg, seed),
    "oracles": lambda cfg, seed: oracle_suite(cfg, seed),
}


def run(suite: str, cfg: QuadConfig = QuadConfig(), seed: int = 42) -> list[Check]:
    names = list(SUITES) if suite == "all" else [suite]
    out = []
    for name in names:
        out.extend(SUITES[name](cfg, seed))
    return out
