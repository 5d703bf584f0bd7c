import math

import numpy as np
import pytest

from infobound import bounds, channels, estimate, info
from infobound.core import (
    ConfigurationError,
    DomainError,
    GaussianLinear,
    GaussianPrior,
    NegExpPrior,
    PoissonLinear,
)

THRESHOLD = 2 * math.pi / math.e - 1
LOG_2PI_E = math.log(2 * math.pi * math.e)


class TestEquivocation:
    def test_zero_and_negative(self):
        assert bounds.equivocation_from_mmse(0.0) == -math.inf
        with pytest.raises(DomainError):
            bounds.equivocation_from_mmse(-1e-3)

    def test_gaussian_equals_conditional_entropy(self):
        p, c = GaussianPrior(0.0, 2.0), GaussianLinear(1.5, 0.0, 0.7)
        post_var = 1 / (0.5 + 1.5**2 / 0.7)
        assert bounds.equivocation_upper_bound(p, c) == pytest.approx(0.5 * (LOG_2PI_E + math.log(post_var)), abs=1e-7)
        h_cond = info.differential_entropy(p) - info.mutual_information_exact(p, c)
        assert bounds.equivocation_upper_bound(p, c) == pytest.approx(h_cond, abs=1e-7)

    def test_poisson_strict(self):
        p, c = NegExpPrior(1.0), PoissonLinear(10.0, 0.0)
        h_cond = info.differential_entropy(p) - info.mutual_information_exact(p, c)
        assert bounds.equivocation_upper_bound(p, c) - h_cond > 1e-3

    def test_zero_gain_is_prior_entropy(self):
        p = GaussianPrior(0.0, 3.0)
        v = bounds.equivocation_upper_bound(p, GaussianLinear(0.0, 0.0, 1.0))
        assert v == pytest.approx(0.5 * (LOG_2PI_E + math.log(3.0)), abs=1e-10)


class TestLowerBound:
    @pytest.mark.parametrize("var_x", [0.1, 1.0, 10.0])
    @pytest.mark.parametrize("snr", [0.01, 1.0, 100.0])
    def test_gaussian_tight(self, var_x, snr):
        p = GaussianPrior(0.5, var_x)
        c = GaussianLinear(math.sqrt(snr / var_x), 0.2, 1.0)
        assert bounds.mi_lower_bound(p, c) == pytest.approx(0.5 * math.log1p(snr), abs=1e-7)

    def test_zero_gain(self):
        assert bounds.mi_lower_bound(GaussianPrior(0.0, 2.0), GaussianLinear(0.0, 0.0, 1.0)) == pytest.approx(0.0, abs=1e-10)

    @pytest.mark.parametrize("s", [0.5, 1.0, 5.0, 50.0])
    def test_poisson_zero_bias_formula(self, s):
        m = 1 / (1 + s)  # MMSE with X̄ = 1
        expected = 0.5 * (1 - math.log(2 * math.pi * m))
        assert bounds.mi_lower_bound(NegExpPrior(1.0), PoissonLinear(s, 0.0)) == pytest.approx(expected, abs=1e-9)
        assert bounds.poisson_zero_bias_bound(s) == pytest.approx(expected, abs=1e-9)

    def test_scale_invariance(self):
        # shifting X̄ at fixed a X̄ leaves the bound unchanged
        v1 = bounds.mi_lower_bound(NegExpPrior(1.0), PoissonLinear(4.0, 2.0))
        v2 = bounds.mi_lower_bound(NegExpPrior(2.0), PoissonLinear(2.0, 2.0))
        assert v1 == pytest.approx(v2, abs=1e-9)

    @pytest.mark.parametrize("s,b", [(0.5, 0), (2, 0), (20, 0), (200, 0), (1, 50), (30, 50), (200, 100)])
    def test_poisson_valid(self, s, b):
        p, c = NegExpPrior(1.0), PoissonLinear(float(s), float(b))
        assert info.mutual_information_exact(p, c) >= bounds.mi_lower_bound(p, c) - 1e-6


class TestThreshold:
    def test_zero_bias_root(self):
        assert bounds.bound_threshold_zero_bias() == pytest.approx(THRESHOLD, abs=1e-8)

    def test_bracketing(self):
        assert bounds.poisson_zero_bias_bound(1.0) < 0 < bounds.poisson_zero_bias_bound(2.0)

    def test_general_route_agrees(self):
        assert bounds.bound_threshold(0.0) == pytest.approx(THRESHOLD, abs=1e-7)

    def test_bias_raises_threshold(self):
        assert bounds.bound_threshold(50.0) > bounds.bound_threshold(1.0) > THRESHOLD


class TestDerivative:
    @pytest.mark.parametrize("snr,rhs", [(1.0, 0.25), (3.0, 0.125), (0.1, 0.5 / 1.1), (10.0, 0.5 / 11)])
    def test_identity(self, snr, rhs):
        var_x, nv = 2.0, 0.5
        r = bounds.gaussian_mi_snr_derivative_check(var_x, math.sqrt(snr * nv / var_x), nv)
        assert r.rhs == pytest.approx(rhs, rel=1e-9)
        assert r.rel_gap < 1e-4

    def test_small_snr(self):
        r = bounds.gaussian_mi_snr_derivative_check(1.0, 1e-3, 1.0)
        assert r.derivative == pytest.approx(0.5, rel=1e-4)

    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            bounds.gaussian_mi_snr_derivative_check(1.0, 0.0, 1.0)


class TestMimo:
    def test_symmetric_tight(self):
        r = bounds.mimo_mi_lower_bound(bounds.DiagonalGaussianMimo.from_snrs([4.0, 4.0]))
        assert r.exact == pytest.approx(math.log(5.0), abs=1e-9)
        assert r.bound == pytest.approx(r.exact, abs=1e-7)

    def test_zero_gains(self):
        r = bounds.mimo_mi_lower_bound(bounds.DiagonalGaussianMimo.from_snrs([0.0, 0.0]))
        assert r.bound == pytest.approx(0.0, abs=1e-10)
        assert r.exact == pytest.approx(0.0, abs=1e-10)

    def test_asymmetric_strict(self):
        r = bounds.mimo_mi_lower_bound(bounds.DiagonalGaussianMimo.from_snrs([1.0, 9.0]))
        # h(X) - ln(2 pi e (1/2 + 1/10) / 2) = -ln(0.3), sum of MIs = ln(sqrt(20))
        assert r.bound == pytest.approx(-math.log(0.3), abs=1e-8)
        assert r.exact == pytest.approx(0.5 * math.log(20.0), abs=1e-8)
        assert r.bound < r.exact

    def test_validation(self):
        with pytest.raises(ConfigurationError):
            bounds.DiagonalGaussianMimo((1.0,), (1.0, 1.0), (1.0,))
        with pytest.raises(DomainError):
            bounds.DiagonalGaussianMimo((1.0,), (0.0,), (1.0,))


class TestReport:
    @pytest.mark.parametrize("p,c", [
        (GaussianPrior(0.0, 1.0), GaussianLinear(2.0, 0.0, 1.0)),
        (NegExpPrior(1.0), PoissonLinear(3.0, 1.0)),
        (NegExpPrior(1.0), GaussianLinear(1.0, 0.0, 0.5)),
    ])
    def test_flags_hold(self, p, c):
        r = bounds.build_report(p, c)
        assert all(r.flags.values()), r.flags
        assert r.mi_lower_bound <= r.mi_exact + 1e-6
        assert r.mmse == pytest.approx(estimate.mmse(p, c), rel=1e-12)


class TestFigureTrends:
    def test_zero_bias_gap_decreasing(self):
        s = np.geomspace(5, 200, 25)
        mi, lb = bounds.fig_series_poisson(s, 0.0)
        assert np.all(np.diff(mi - lb) < 0)

    @pytest.mark.xfail(strict=True, reason="with b > 0 the gap has an interior minimum near aX̄ = 65 (b = 50)")
    def test_biased_gap_decreasing_on_5_100(self):
        s = np.geomspace(5, 100, 25)
        mi, lb = bounds.fig_series_poisson(s, 50.0)
        assert np.all(np.diff(mi - lb) < 0)

    def test_biased_gap_has_interior_minimum(self):
        s = np.geomspace(5, 200, 40)
        mi, lb = bounds.fig_series_poisson(s, 50.0)
        k = int(np.argmin(mi - lb))
        assert 0 < k < s.size - 1
        assert 40 < s[k] < 100

    def test_mi_decreasing_in_bias(self):
        for s in (5.0, 20.0, 80.0):
            vals = [channels.poisson_mi(1.0, s, b) for b in np.linspace(0, 200, 9)]
            assert np.all(np.diff(vals) < 0)
