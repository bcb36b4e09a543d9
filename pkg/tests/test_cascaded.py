import math

import numpy as np
import pytest
from scipy import integrate, stats

import _oracles as oracle
from zeris.cascaded import (
    XI_MOMENTS,
    GammaFit,
    delta_moments,
    delta_moments_printed,
    delta_moments_termwise,
    fit_delta,
    gamma_cdf,
    gamma_fit,
    gamma_pdf,
    zed_params,
)


def test_xi_moments_match_simulation():
    rng = np.random.default_rng(1)
    h = (rng.standard_normal((2, 1_000_000)) + 1j * rng.standard_normal((2, 1_000_000))) * math.sqrt(0.5)
    xi = np.abs(h[0]) * np.abs(h[1])
    for k, m in enumerate(XI_MOMENTS, start=1):
        draws = xi**k
        assert abs(draws.mean() - m) < 4 * draws.std() / 1000


@pytest.mark.parametrize("args, mean, second", [((1, 0), 1.0, 4.0), ((0, 1), 1.0, 4.0)])
def test_single_element_moments(args, mean, second):
    assert delta_moments(*args) == pytest.approx((mean, second))
    assert delta_moments_printed(*args) == pytest.approx((mean, second))


def test_mean_at_default_split():
    mean, _ = delta_moments(15, 15)
    assert mean == pytest.approx(30 + 15 * 14 * math.pi**2 / 16)
    assert mean == pytest.approx(159.54, abs=5e-3)


@pytest.mark.parametrize("n1, n2", [(0, 3), (3, 0), (2, 2), (3, 2), (1, 4), (4, 3)])
def test_collected_form_equals_termwise_sum(n1, n2):
    closed = delta_moments(n1, n2)
    brute = delta_moments_termwise(n1, n2)
    assert closed[0] == pytest.approx(brute[0], rel=1e-12)
    assert closed[1] == pytest.approx(brute[1], rel=1e-12)


def test_printed_polynomial_deviates_from_termwise_sum():
    # the alternative collected second moment is only right for tiny surfaces
    for n1, n2 in [(3, 2), (2, 4), (4, 4)]:
        assert delta_moments_printed(n1, n2)[1] != pytest.approx(delta_moments_termwise(n1, n2)[1], rel=1e-3)
    for n1, n2 in [(1, 0), (0, 1), (1, 1)]:
        assert delta_moments_printed(n1, n2)[1] == pytest.approx(delta_moments_termwise(n1, n2)[1], rel=1e-12)


def test_moments_match_direct_simulation_default_split():
    draws = oracle.simulate_delta(15, 15, 400_000, np.random.default_rng(2))
    mean, second = delta_moments(15, 15)
    sq = draws**2
    assert abs(draws.mean() - mean) < 3 * draws.std() / math.sqrt(len(draws))
    assert abs(sq.mean() - second) < 3 * sq.std() / math.sqrt(len(draws))
    # the alternative polynomial sits far outside the sampling error
    assert abs(sq.mean() - delta_moments_printed(15, 15)[1]) > 20 * sq.std() / math.sqrt(len(draws))


def test_swapping_arguments_gives_jamming_gain():
    draws = oracle.simulate_delta(2, 6, 300_000, np.random.default_rng(4))
    mean, second = delta_moments(2, 6)
    assert abs(draws.mean() - mean) < 3 * draws.std() / math.sqrt(len(draws))
    assert delta_moments(6, 2) != delta_moments(2, 6)


def test_negative_counts_rejected():
    for args in [(-1, 3), (0, 0)]:
        with pytest.raises(ValueError):
            delta_moments(*args)


def test_gamma_fit_examples():
    fit = gamma_fit(1.0, 4.0)
    assert (fit.k, fit.theta) == pytest.approx((1 / 3, 3.0))
    with pytest.raises(ValueError):
        gamma_fit(2.0, 4.0)


@pytest.mark.parametrize("n1, n2", [(0, 1), (1, 0), (5, 9), (15, 15), (40, 2)])
def test_moment_match_identities(n1, n2):
    fit = fit_delta(n1, n2)
    assert fit.k * fit.theta == pytest.approx(fit.mean, rel=1e-14)
    assert fit.k * fit.theta**2 == pytest.approx(fit.variance, rel=1e-13)
    assert fit.k > 0 and fit.theta > 0


def test_fitted_cdf_close_to_empirical():
    draws = oracle.simulate_delta(15, 15, 200_000, np.random.default_rng(5))
    fit = fit_delta(15, 15)
    d = stats.kstest(draws, lambda z: gamma_cdf(z, fit)).statistic
    assert d < 0.05


def test_zed_params():
    z30 = zed_params(30)
    assert z30.v == pytest.approx(48.298, abs=1e-3)
    assert z30.phi == pytest.approx(0.48784, abs=1e-5)
    assert zed_params(1).v == pytest.approx(1.6099, abs=1e-4)
    assert zed_params(7).phi == z30.phi
    with pytest.raises(ValueError):
        zed_params(0)


def test_zed_distribution_against_simulation():
    rng = np.random.default_rng(6)
    N = 30
    total = np.zeros(1_000_000)
    for _ in range(N):
        h1 = rng.standard_normal((2, 1_000_000))
        h2 = rng.standard_normal((2, 1_000_000))
        total += np.sqrt(0.5 * (h1**2).sum(0)) * np.sqrt(0.5 * (h2**2).sum(0))
    z = zed_params(N)
    d = stats.kstest(total, stats.gamma(z.v, scale=z.phi).cdf).statistic
    assert d < 0.02


def test_gamma_pdf_cdf():
    exp_fit = GammaFit(k=1.0, theta=1.0, mean=1.0, second_moment=2.0)
    assert gamma_cdf(0.0, exp_fit) == 0.0
    assert gamma_cdf(1.0, exp_fit) == pytest.approx(1 - math.exp(-1))
    fit = gamma_fit(1.0, 4.0)
    numeric, _ = integrate.quad(lambda z: gamma_pdf(z, fit), 0, 1, epsabs=1e-13, epsrel=1e-12)
    assert gamma_cdf(1.0, fit) == pytest.approx(numeric, abs=1e-8)
    total, _ = integrate.quad(lambda z: gamma_pdf(z, fit_delta(4, 4)), 0, np.inf)
    assert total == pytest.approx(1.0, abs=1e-8)
    grid = np.linspace(0, 50, 200)
    assert np.all(np.diff(gamma_cdf(grid, fit)) >= 0)
    with pytest.raises(ValueError):
        gamma_pdf(-1.0, fit)
    with pytest.raises(ValueError):
        gamma_cdf(-0.1, fit)
