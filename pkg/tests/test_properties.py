"""Property-based checks of the invariants that must hold for any valid parameters."""

import math

import numpy as np
import pytest
from hypothesis import HealthCheck, example, given, settings, strategies as st

from infobound import bounds, channels, estimate, info
from infobound import nuisance as nz
from infobound.core import DiscretePrior, GaussianLinear, GaussianPrior, NegExpPrior, PoissonLinear

SLOW = settings(max_examples=20, deadline=None, suppress_health_check=[HealthCheck.too_slow])
FAST = settings(max_examples=200, deadline=None)

pos = st.floats(0.05, 20.0)
gain = st.floats(0.05, 10.0)
bias = st.floats(0.0, 100.0)


@st.composite
def continuous_pair(draw):
    prior = draw(st.sampled_from(["gauss", "negexp"]))
    p = GaussianPrior(draw(st.floats(-3, 3)), draw(pos)) if prior == "gauss" else NegExpPrior(draw(pos))
    if draw(st.booleans()):
        c = GaussianLinear(draw(gain), draw(st.floats(-2, 2)), draw(pos))
    else:
        p = NegExpPrior(draw(pos))
        c = PoissonLinear(draw(gain), draw(bias))
    return p, c


@SLOW
@given(continuous_pair())
@example((NegExpPrior(4.0), GaussianLinear(9.0, 0.0, 1.0)))  # high SNR against a kinked prior
def test_mi_and_bound_chain(pc):
    p, c = pc
    mi = info.mutual_information_exact(p, c)
    m = estimate.mmse(p, c)
    assert mi >= -1e-9
    assert m <= float(p.variance()) * (1 + 1e-9)
    assert mi >= bounds.mi_lower_bound(p, c) - 1e-6
    h_cond = info.differential_entropy(p) - mi
    assert h_cond <= bounds.equivocation_upper_bound(p, c) + 1e-6


@SLOW
@given(pos, st.floats(0.001, 1000.0), st.floats(-5, 5))
def test_gaussian_bound_is_tight(var_x, snr, mean):
    p = GaussianPrior(mean, var_x)
    c = GaussianLinear(math.sqrt(snr / var_x), 0.0, 1.0)
    assert bounds.mi_lower_bound(p, c) == pytest.approx(0.5 * math.log1p(snr), abs=1e-7)


@FAST
@given(st.floats(0.01, 1e3), st.floats(0.1, 10.0))
def test_poisson_zero_bias_series(s, xbar):
    assert channels.poisson_mmse_series(xbar, s / xbar, 0.0) == pytest.approx(xbar**2 / (1 + s), rel=1e-8)


@SLOW
@given(st.floats(0.1, 100.0), bias, st.floats(0.2, 5.0))
def test_poisson_quantities_scale_with_mean(s, b, xbar):
    # MI depends on (a xbar, b); MMSE scales as xbar^2
    assert channels.poisson_mi(xbar, s / xbar, b) == pytest.approx(channels.poisson_mi(1.0, s, b), rel=1e-9, abs=1e-13)
    assert channels.poisson_mmse(xbar, s / xbar, b) == pytest.approx(xbar**2 * channels.poisson_mmse(1.0, s, b), rel=1e-9)


@SLOW
@given(st.floats(0.5, 50.0), st.floats(0.0, 50.0), st.floats(1.0, 50.0))
def test_poisson_mi_decreases_with_bias(s, b, db):
    assert channels.poisson_mi(1.0, s, b + db) < channels.poisson_mi(1.0, s, b)


@st.composite
def discrete_input(draw):
    k = draw(st.integers(2, 3))
    atoms = sorted(draw(st.lists(st.floats(0.1, 5.0), min_size=k, max_size=k, unique=True)))
    if min(np.diff(atoms)) < 1e-3:
        atoms = [0.5 + i for i in range(k)]
    w = np.array(draw(st.lists(st.floats(0.05, 1.0), min_size=k, max_size=k)))
    return DiscretePrior(atoms, w / w.sum())


@SLOW
@given(discrete_input(), st.booleans(), gain, st.floats(0.0, 5.0))
def test_cri_upper_bound(p, gaussian, a, b):
    c = GaussianLinear(a, b, 1.0) if gaussian else PoissonLinear(a, b + 0.1)
    mi = info.discrete_input_mi(p, c)
    assert 0 <= mi <= math.log(p.atoms.size) + 1e-12
    assert info.mi_upper_bound_discrete(p, c) >= mi - 1e-9


@settings(max_examples=8, deadline=None)
@given(pos, gain, pos, gain, pos)
def test_second_measurement_never_hurts(var_x, a1, n1, a2, n2):
    p = GaussianPrior(0.0, var_x)
    pair = estimate.mmse_two_measurements(p, GaussianLinear(a1, 0.0, n1), GaussianLinear(a2, 0.0, n2))
    assert pair.joint <= pair.single + 1e-8
    assert pair.joint == pytest.approx(1 / (1 / var_x + a1 * a1 / n1 + a2 * a2 / n2), rel=1e-6)


nuisance_params = st.builds(
    nz.NuisanceGaussianParams,
    a=st.floats(-5, 5).filter(lambda v: abs(v) > 1e-3),
    b=st.floats(-5, 5).filter(lambda v: abs(v) > 1e-3),
    alpha=st.floats(-5, 5),
    var_xu=st.floats(0.01, 10),
    var_u=st.floats(0.01, 10),
    u_bar=st.floats(-3, 3),
    noise_var=st.floats(0.01, 10),
)


@FAST
@given(nuisance_params)
def test_nuisance_mmse_ordering(p):
    plus, minus = nz.mmse_with_without_nuisance(p)
    assert plus >= minus - 1e-12 * max(1.0, plus)


@FAST
@given(nuisance_params)
def test_nuisance_identities(p):
    assert p.var_x == p.var_xu + p.alpha**2 * p.var_u
    assert p.var_u_given_x <= p.var_u * (1 + 1e-15)
    assert p.var_y == pytest.approx(p.var_y_given_x + p.marginal_gain**2 * p.var_x, rel=1e-10)
    # the Gaussian channel identity I = h(Y) - h(Y|X) with the marginalized channel
    assert nz.mi_with_nuisance(p) == pytest.approx(0.5 * math.log(p.var_y / p.var_y_given_x), rel=1e-14)


@FAST
@given(st.floats(0.01, 100), st.floats(0.01, 100))
def test_nuisance_equality_locus(chi, snr_u):
    plus, minus = nz.mmse_with_without_nuisance(nz.NuisanceGaussianParams.normalized(chi, chi, snr_u))
    assert abs(plus - minus) < 1e-12 * max(1.0, plus)


@FAST
@given(nuisance_params)
def test_uncorrelated_orderings(p):
    q = nz.NuisanceGaussianParams(p.a, p.b, 0.0, p.var_xu, p.var_u, p.u_bar, p.noise_var)
    assert nz.mi_without_nuisance(q) > nz.mi_with_nuisance(q)
    jp, jm = nz.fi_marginalized_vs_conditional(q)
    assert jm > jp


@FAST
@given(st.integers(0, 2**32 - 1), st.integers(2, 4), st.integers(2, 3), st.integers(2, 4))
def test_discrete_nuisance_independent_inputs(seed, nx, nu, ny):
    rng = np.random.default_rng(seed)
    p_xu = np.outer(rng.dirichlet(np.ones(nx)), rng.dirichlet(np.ones(nu)))
    ch = rng.dirichlet(np.ones(ny), size=(nx, nu))
    r = nz.discrete_nuisance_mi(p_xu, ch)
    assert r.mi_plus >= -1e-12
    assert r.mi_minus >= r.mi_plus - 1e-12
