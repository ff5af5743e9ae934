import math

import numpy as np
import pytest
from scipy import integrate, stats

from abcmu import (
    DiscretePmf,
    GaussianErrorLaw,
    InputError,
    TailMassError,
    approx_bayes_factor,
    gaussian_fitted_posterior_error,
    gaussian_prior_predictive_error,
    poisson_bruteforce_target,
    poisson_marginal_likelihood,
    poisson_posterior_error,
    shifted_poisson_xi,
)


# ---------------------------------------------------------------------------
# shifted Poisson error law


def test_shifted_poisson_xi_matches_direct_formula():
    for theta, x0, eps in [(2.0, 3, 0), (2.0, 3, -2), (0.7, 1, 4), (5.0, 0, 2)]:
        expected = theta ** (x0 + eps) * math.exp(-theta) / math.factorial(x0 + eps)
        assert shifted_poisson_xi(theta, x0, eps) == pytest.approx(expected)


def test_shifted_poisson_xi_vanishes_below_support():
    assert shifted_poisson_xi(2.0, 3, -4) == 0.0
    assert shifted_poisson_xi(2.0, 0, -1) == 0.0


def test_shifted_poisson_xi_sums_to_one_over_errors():
    total = sum(shifted_poisson_xi(2.5, 3, e) for e in range(-3, 80))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_shifted_poisson_xi_defined_for_negative_shifted_argument():
    # as a function of x0 the law extends to negative x0 when x0+eps >= 0
    assert shifted_poisson_xi(1.0, -2, 5) == pytest.approx(
        1.0 * math.exp(-1.0) / math.factorial(3)
    )


# ---------------------------------------------------------------------------
# Gaussian location model laws


def test_gaussian_prior_predictive_error_law():
    law = gaussian_prior_predictive_error(theta_star=2.0, h2=9.0, x0=5.0)
    assert law.mean == pytest.approx(-3.0)
    assert law.variance == pytest.approx(10.0)


def test_gaussian_prior_predictive_matches_quadrature():
    theta_star, h2, x0 = 1.0, 4.0, 2.5
    law = gaussian_prior_predictive_error(theta_star, h2, x0)

    def integrand(e):
        f = lambda t: stats.norm.pdf(e + x0, t, 1.0) * stats.norm.pdf(
            t, theta_star, math.sqrt(h2)
        )
        return integrate.quad(f, -30, 30)[0]

    for e in (-2.0, 0.0, 1.3):
        assert law.pdf(e) == pytest.approx(integrand(e), rel=1e-8)


def test_gaussian_fitted_posterior_error_closed_form():
    tau = math.sqrt(10.0)
    law = gaussian_fitted_posterior_error(0.0, 9.0, 5.0, tau)
    assert law.mean == pytest.approx(-2.5)
    assert law.variance == pytest.approx(5.0)


def test_gaussian_fitted_posterior_matches_quadrature():
    theta_star, h2, x0, tau = 0.7, 3.0, 2.0, 1.5

    def joint(e, t):
        return (
            stats.norm.pdf(e + x0, t, 1.0)
            * stats.norm.pdf(t, theta_star, math.sqrt(h2))
            * stats.norm.pdf(e, 0.0, tau)
        )

    grid = np.linspace(-4, 4, 9)
    norm = integrate.dblquad(joint, -40, 40, -25, 25)[0]
    law = gaussian_fitted_posterior_error(theta_star, h2, x0, tau)
    for e in grid:
        marginal = integrate.quad(lambda t: joint(e, t), -40, 40)[0] / norm
        assert law.pdf(e) == pytest.approx(marginal, rel=1e-6, abs=1e-12)


def test_flat_prior_limit_recovers_error_prior():
    law = gaussian_fitted_posterior_error(0.0, 1e12, 4.0, 2.0)
    assert law.mean == pytest.approx(0.0, abs=1e-6)
    assert law.variance == pytest.approx(4.0, rel=1e-6)


def test_gaussian_error_law_validates_variance():
    with pytest.raises(InputError):
        GaussianErrorLaw(0.0, 0.0)


# ---------------------------------------------------------------------------
# approximate Bayes factor


def _bayes_factor_quadrature(x0, theta_star, h2, tau2):
    h = math.sqrt(h2)

    def marglik(model_var):
        f = lambda t: stats.norm.pdf(
            x0, t, math.sqrt(model_var + tau2)
        ) * stats.norm.pdf(t, theta_star, h)
        lo = theta_star - 12 * h
        hi = theta_star + 12 * h
        return integrate.quad(f, lo, hi, limit=200)[0]

    return marglik(3.0) / marglik(1.0)


def test_bayes_factor_matches_quadrature_spot_checks():
    for x0, theta_star, h2, tau2 in [
        (1.0, 0.0, 2.0, 1.0),
        (3.0, -1.0, 5.0, 0.5),
        (0.0, 0.0, 1.0, 4.0),
    ]:
        b = approx_bayes_factor(x0, theta_star, h2, tau2)
        assert b == pytest.approx(
            _bayes_factor_quadrature(x0, theta_star, h2, tau2), rel=1e-8
        )


def test_bayes_factor_tends_to_one_for_flat_prior():
    assert abs(approx_bayes_factor(2.0, 0.0, 1e8, 1.0) - 1.0) < 1e-3


def test_bayes_factor_below_one_at_matching_data():
    # with x0 = theta_star only the variance-ratio prefactor remains (< 1)
    b = approx_bayes_factor(0.0, 0.0, 1.0, 1.0)
    assert b == pytest.approx(math.sqrt(3.0 / 5.0))


# ---------------------------------------------------------------------------
# Poisson posterior error and marginal likelihood


def _poisson_pmf_bruteforce(x0, tau, e_max=400):
    errors = np.arange(-x0, e_max + 1)
    inv_tau = 0.0 if math.isinf(tau) else 1.0 / tau
    masses = np.array(
        [2.0 ** (-(x0 + e + abs(e) * inv_tau + 1.0)) for e in errors]
    )
    return errors, masses / masses.sum()


def test_poisson_posterior_error_matches_enumeration():
    for x0, tau in [(0, 1.0), (1, 1.0), (3, 2.0), (5, 2.0 / 3.0), (2, math.inf)]:
        pmf = poisson_posterior_error(x0, tau)
        errs, masses = _poisson_pmf_bruteforce(x0, tau)
        lookup = dict(zip(errs, masses))
        for e, m in zip(pmf.support, pmf.masses):
            assert m == pytest.approx(lookup[int(e)], rel=1e-10, abs=1e-15)
        assert pmf.masses.sum() == pytest.approx(1.0, abs=1e-12)
        assert pmf.support[0] == -x0


def test_poisson_prior_predictive_mean_error_is_zero_at_one():
    pmf = poisson_posterior_error(1, math.inf)
    assert abs(pmf.mean()) < 1e-9


def test_poisson_posterior_mean_error_is_negative_for_tight_tau():
    assert poisson_posterior_error(3, 0.5).mean() < 0.0


def _poisson_marglik_bruteforce(x0, tau, e_max=2000):
    errs, _ = _poisson_pmf_bruteforce(x0, tau, e_max)
    inv_tau = 0.0 if math.isinf(tau) else 1.0 / tau
    total = 0.0
    for e in errs:
        total += 2.0 ** (-(x0 + e + abs(e) * inv_tau + 1.0))
    norm = 0.0
    for e in errs:
        norm += 2.0 ** (-abs(e) * inv_tau) if not math.isinf(tau) else 1.0
    del norm
    return total


def test_poisson_marginal_likelihood_reference_values():
    assert poisson_marginal_likelihood(0, 1.0) == pytest.approx(2.0 / 3.0)
    assert poisson_marginal_likelihood(1, 1.0) == pytest.approx(7.0 / 12.0)
    assert poisson_marginal_likelihood(4, math.inf) == pytest.approx(1.0, abs=1e-9)


def test_poisson_marginal_likelihood_limit_branch_is_continuous():
    for x0 in (0, 2, 7):
        at_limit = poisson_marginal_likelihood(x0, 1.0)
        nearby = poisson_marginal_likelihood(x0, 1.0 + 1e-7)
        assert at_limit == pytest.approx(nearby, rel=1e-5)


def test_poisson_marginal_likelihood_monotone_decreasing_in_x0():
    for tau in (0.5, 2.0 / 3.0, 1.0, 2.0, 10.0):
        values = [poisson_marginal_likelihood(x0, tau) for x0 in range(21)]
        assert all(b < a for a, b in zip(values, values[1:]))


# ---------------------------------------------------------------------------
# brute-force joint target


def test_bruteforce_target_normalizes():
    grid = np.arange(0.25, 12.25, 0.25)
    tg, errs, joint = poisson_bruteforce_target(grid, x_max=60, x0=3, tau=1.0)
    assert joint.shape == (grid.size, errs.size)
    assert joint.sum() == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_array_equal(tg, grid)


def test_bruteforce_target_theta_marginal_tracks_prior_times_evidence():
    grid = np.arange(0.5, 10.5, 0.5)
    _, errs, joint = poisson_bruteforce_target(grid, x_max=60, x0=3, tau=1.0)
    marginal = joint.sum(axis=1)
    direct = np.array(
        [
            math.exp(-t)
            * sum(
                shifted_poisson_xi(t, 3, int(e)) * 2.0 ** (-abs(e))
                for e in errs
            )
            for t in grid
        ]
    )
    direct /= direct.sum()
    np.testing.assert_allclose(marginal, direct, rtol=1e-10)


def test_bruteforce_target_flags_truncation():
    grid = np.array([20.0, 30.0])
    with pytest.raises(TailMassError):
        poisson_bruteforce_target(grid, x_max=25, x0=3, tau=1.0)


# ---------------------------------------------------------------------------
# containers


def test_discrete_pmf_validates_mass():
    with pytest.raises(InputError):
        DiscretePmf(np.array([0, 1]), np.array([0.7, 0.7]))


def test_discrete_pmf_mean():
    pmf = DiscretePmf(np.array([-1, 0, 1]), np.array([0.25, 0.5, 0.25]))
    assert pmf.mean() == pytest.approx(0.0)
