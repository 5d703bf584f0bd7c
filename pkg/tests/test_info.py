import math

import numpy as np
import pytest
from scipy import integrate, stats

from infobound import info
from infobound.core import (
    ConfigurationError,
    DiscretePrior,
    DivergenceError,
    GaussianLinear,
    GaussianPrior,
    NegExpPrior,
    PoissonLinear,
    TabulatedPrior,
)
from infobound.nuisance import NuisanceGaussianParams


def gaussian_pair(var_x, snr, b=0.0, noise_var=1.0, mean=0.0):
    return GaussianPrior(mean, var_x), GaussianLinear(math.sqrt(snr * noise_var / var_x), b, noise_var)


class TestEntropy:
    @pytest.mark.parametrize("p", [GaussianPrior(1.0, 0.3), GaussianPrior(-2.0, 5.0), NegExpPrior(0.7), NegExpPrior(4.0)])
    def test_closed_form_matches_quadrature(self, p):
        assert info.differential_entropy(p) == pytest.approx(info.entropy_by_quadrature(p), abs=1e-10)

    def test_negexp(self):
        assert info.differential_entropy(NegExpPrior(math.e)) == pytest.approx(2.0, rel=1e-15)

    def test_tabulated_uniform(self):
        g = np.linspace(0, 4, 101)
        p = TabulatedPrior(g, np.full(g.size, 0.25))
        assert info.differential_entropy(p) == pytest.approx(math.log(4), rel=1e-12)

    def test_discrete_rejected(self):
        with pytest.raises(ConfigurationError):
            info.differential_entropy(DiscretePrior([0.0], [1.0]))


class TestMutualInformation:
    @pytest.mark.parametrize("var_x,snr", [(0.1, 0.01), (1.0, 1.0), (3.0, 3.0), (0.5, 10.0), (10.0, 100.0)])
    def test_gaussian_closed_form(self, var_x, snr):
        p, c = gaussian_pair(var_x, snr)
        assert info.mutual_information_exact(p, c) == pytest.approx(0.5 * math.log1p(snr), abs=1e-10)

    @pytest.mark.parametrize("beta", [1.0, 10.0])
    def test_bias_invariance(self, beta):
        p, c0 = gaussian_pair(2.0, 3.0)
        _, cb = gaussian_pair(2.0, 3.0, b=beta)
        assert abs(info.mutual_information_exact(p, c0) - info.mutual_information_exact(p, cb)) < 1e-8

    def test_zero_gain(self):
        assert info.mutual_information_exact(GaussianPrior(0, 1), GaussianLinear(0.0, 1.0, 1.0)) == 0.0

    def test_negexp_gaussian_against_scipy(self):
        p, c = NegExpPrior(1.0), GaussianLinear(1.0, 0.0, 1.0)

        def py(y):
            f = lambda x: math.exp(-x) * stats.norm.pdf(y, x, 1.0)
            return integrate.quad(f, 0, np.inf, epsabs=0, epsrel=1e-11)[0]

        # I = h(Y) - h(N)
        hy = integrate.quad(lambda y: -py(y) * math.log(py(y)), -12, 45, limit=200, epsabs=1e-11)[0]
        ref = hy - 0.5 * math.log(2 * math.pi * math.e)
        assert info.mutual_information_exact(p, c) == pytest.approx(ref, abs=1e-8)

    def test_tabulated_matches_gaussian(self):
        g = np.linspace(-10, 10, 8001)
        d = stats.norm.pdf(g)
        p = TabulatedPrior(g, d / np.trapezoid(d, g))
        c = GaussianLinear(1.0, 0.0, 1.0)
        assert info.mutual_information_exact(p, c) == pytest.approx(0.5 * math.log(2), abs=1e-6)

    def test_poisson_rejects_gaussian_prior(self):
        with pytest.raises(ConfigurationError):
            info.mutual_information_exact(GaussianPrior(0, 1), PoissonLinear(1.0, 1.0))


class TestDiscreteInput:
    def test_gaussian_two_atoms_against_scipy(self):
        p = DiscretePrior([0.0, 1.0], [0.3, 0.7])
        c = GaussianLinear(1.0, 0.0, 0.5)
        sd = math.sqrt(0.5)

        def integrand(y):
            l0, l1 = stats.norm.pdf(y, 0, sd), stats.norm.pdf(y, 1, sd)
            py = 0.3 * l0 + 0.7 * l1
            return 0.3 * l0 * math.log(l0 / py) + 0.7 * l1 * math.log(l1 / py)

        ref = integrate.quad(integrand, -10, 11, epsabs=1e-13, limit=200)[0]
        assert info.discrete_input_mi(p, c) == pytest.approx(ref, abs=1e-11)
        assert info.mutual_information_exact(p, c) == pytest.approx(ref, abs=1e-9)

    def test_poisson_two_atoms_against_stats(self):
        p = DiscretePrior([0.0, 1.0], [0.5, 0.5])
        c = PoissonLinear(1.0, 1.0)
        y = np.arange(80)
        l0, l1 = stats.poisson.pmf(y, 1.0), stats.poisson.pmf(y, 2.0)
        py = 0.5 * (l0 + l1)
        ref = 0.5 * np.sum(l0 * np.log(l0 / py)) + 0.5 * np.sum(l1 * np.log(l1 / py))
        assert info.discrete_input_mi(p, c) == pytest.approx(ref, abs=1e-13)
        assert info.mutual_information_exact(p, c) == pytest.approx(ref, abs=1e-12)

    def test_single_atom(self):
        assert info.discrete_input_mi(DiscretePrior([2.0], [1.0]), PoissonLinear(1.0, 0.5)) == pytest.approx(0.0, abs=1e-15)


class TestFisher:
    def test_gaussian(self):
        assert info.fisher_information(GaussianLinear(2.0, 0.0, 4.0), 0.37) == pytest.approx(1.0, rel=1e-10)
        assert info.fisher_information(GaussianLinear(0.0, 0.0, 4.0), 0.37) == 0.0

    @pytest.mark.parametrize("a,b,x", [(1, 0, 1), (2, 1, 0.5), (0.3, 50, 10), (10, 0, 40)])
    def test_poisson(self, a, b, x):
        assert info.fisher_information(PoissonLinear(a, b), x) == pytest.approx(a * a / (a * x + b), rel=1e-8)

    def test_profile(self):
        prof = info.fi_profile(NegExpPrior(2.0), PoissonLinear(3.0, 1.0))
        for x, j in prof.pairs():
            assert j == pytest.approx(9.0 / (3 * x + 1), rel=1e-8)
        prof = info.fi_profile(GaussianPrior(0, 1), GaussianLinear(1.5, 0, 0.5), xs=[-1, 0, 2])
        np.testing.assert_allclose(prof.j_values, 4.5, rtol=1e-10)


class TestSecondOrder:
    @pytest.mark.parametrize("var_x,snr", [(1.0, 1.0), (0.01, 0.3), (5.0, 7.0)])
    def test_gaussian_half_snr(self, var_x, snr):
        p, c = gaussian_pair(var_x, snr)
        assert info.mi_second_order(p, c) == pytest.approx(0.5 * snr, abs=1e-9)

    def test_point_mass(self):
        assert info.mi_second_order(DiscretePrior([1.5], [1.0]), GaussianLinear(1, 0, 1)) == 0.0

    def test_zero_bias_poisson_diverges(self):
        assert info.mi_second_order(NegExpPrior(1.0), PoissonLinear(1.0, 0.0)) == math.inf

    def test_biased_poisson_against_scipy(self):
        a, b = 2.0, 3.0
        f = lambda x: math.exp(-x) * (x - 1) ** 2 * a * a / (a * x + b)
        ref = 0.5 * integrate.quad(f, 0, np.inf, epsabs=0, epsrel=1e-12)[0]
        assert info.mi_second_order(NegExpPrior(1.0), PoissonLinear(a, b)) == pytest.approx(ref, rel=1e-8)

    def test_ratio_small_snr(self):
        for snr in (1e-4, 1e-3, 1e-2):
            p, c = gaussian_pair(1.0, snr)
            r = info.mutual_information_exact(p, c) / info.mi_second_order(p, c)
            assert 1 - 2 * snr <= r <= 1


class TestChapmanRobbins:
    def test_same_point(self):
        assert info.chapman_robbins_K(GaussianLinear(1, 0, 1), 0.4, 0.4) == 0.0

    @pytest.mark.parametrize("delta", [0.1, 1.0, 2.0])
    def test_gaussian_identity(self, delta):
        assert info.chapman_robbins_K(GaussianLinear(1, 0, 1), 0.0, delta) == pytest.approx(math.expm1(delta**2), rel=1e-10)

    def test_gaussian_by_scipy(self):
        c = GaussianLinear(1.3, 0.2, 0.6)
        sd = math.sqrt(0.6)
        f = lambda y: (stats.norm.pdf(y, 1.3 * 0.9 + 0.2, sd) - stats.norm.pdf(y, 0.2, sd)) ** 2 / stats.norm.pdf(y, 0.2, sd)
        ref = integrate.quad(f, -15, 15, epsabs=1e-13, limit=200)[0]
        assert info.chapman_robbins_K(c, 0.0, 0.9) == pytest.approx(ref, rel=1e-9)

    def test_poisson_brute_force(self):
        y = np.arange(100)
        p0, p1 = stats.poisson.pmf(y, 1.0), stats.poisson.pmf(y, 2.0)
        ref = np.sum((p1 - p0) ** 2 / p0)
        assert info.chapman_robbins_K(PoissonLinear(1.0, 1.0), 0.0, 1.0) == pytest.approx(ref, rel=1e-12)

    def test_poisson_support_violation(self):
        with pytest.raises(DivergenceError):
            info.chapman_robbins_K(PoissonLinear(1.0, 0.0), 0.0, 1.0)

    def test_poisson_to_zero_rate(self):
        # P(y|x') = [y = 0]; K = 1/p(0|x) - 1
        assert info.chapman_robbins_K(PoissonLinear(1.0, 0.0), 2.0, 0.0) == pytest.approx(math.expm1(2.0), rel=1e-14)


class TestUpperBound:
    def test_single_atom(self):
        assert info.mi_upper_bound_discrete(DiscretePrior([1.0], [1.0]), GaussianLinear(1, 0, 1)) == 0.0

    def test_two_close_atoms(self):
        d = 0.05
        p = DiscretePrior([0.0, d], [0.5, 0.5])
        c = GaussianLinear(1, 0, 1)
        ub = info.mi_upper_bound_discrete(p, c)
        assert ub == pytest.approx(0.25 * math.expm1(d * d), rel=1e-10)
        assert ub >= info.discrete_input_mi(p, c)

    @pytest.mark.parametrize("c", [GaussianLinear(1, 0, 1), PoissonLinear(1.0, 1.0)])
    def test_dominates(self, c):
        p = DiscretePrior([0.0, 1.0, 2.5], [0.2, 0.5, 0.3])
        assert info.mi_upper_bound_discrete(p, c) >= info.discrete_input_mi(p, c) - 1e-9


class TestMimo:
    def test_closed_form(self):
        m = NuisanceGaussianParams(a=1.5, b=0.7, alpha=0.0, var_xu=2.0, var_u=3.0, noise_var=0.8)
        ref = 0.5 * (1.5**2 * 2.0 + 0.7**2 * 3.0) / 0.8
        assert info.mi_second_order_mimo(m) == pytest.approx(ref, rel=1e-10)

    def test_reduces_to_scalar(self):
        m = NuisanceGaussianParams(a=1.5, b=0.0, alpha=0.0, var_xu=2.0, var_u=3.0, noise_var=0.8)
        p, c = GaussianPrior(0.0, 2.0), GaussianLinear(1.5, 0.0, 0.8)
        assert info.mi_second_order_mimo(m) == pytest.approx(info.mi_second_order(p, c), rel=1e-10)

    def test_zero_gains(self):
        m = NuisanceGaussianParams(a=0.0, b=0.0, alpha=0.0, var_xu=2.0, var_u=3.0)
        assert info.mi_second_order_mimo(m) == 0.0

    def test_needs_independent_inputs(self):
        m = NuisanceGaussianParams(a=1.0, b=1.0, alpha=0.5, var_xu=2.0, var_u=3.0)
        with pytest.raises(ConfigurationError):
            info.mi_second_order_mimo(m)

    def test_fisher_matrix(self):
        J = info.fisher_matrix_linear_gaussian([2.0, -1.0], 0.5)
        np.testing.assert_allclose(J, np.outer([2.0, -1.0], [2.0, -1.0]) / 0.5, rtol=1e-10)
