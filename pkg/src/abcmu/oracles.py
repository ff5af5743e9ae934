"""Closed-form reference quantities for the worked examples.

Pure functions only; these serve as ground truth for the sampler tests
and are exposed through the CLI ``oracle`` subcommand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import InputError, TailMassError


@dataclass(frozen=True)
class GaussianErrorLaw:
    """A Gaussian law over a scalar error term."""

    mean: float
    variance: float

    def __post_init__(self):
        if self.variance <= 0:
            raise InputError("variance must be positive")

    def pdf(self, e):
        return stats.norm.pdf(e, self.mean, math.sqrt(self.variance))

    def cdf(self, e):
        return stats.norm.cdf(e, self.mean, math.sqrt(self.variance))


@dataclass(frozen=True)
class DiscretePmf:
    """Probability masses on an integer error lattice."""

    support: np.ndarray  # integer offsets, lower-bounded by -x0
    masses: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.support, dtype=int)
        m = np.asarray(self.masses, dtype=float)
        if s.size != m.size:
            raise InputError("support and masses must have equal length")
        if np.any(m < 0):
            raise InputError("masses must be nonnegative")
        total = m.sum()
        if abs(total - 1.0) > 1e-12:
            raise InputError(f"masses must sum to 1 (got {total})")
        s.flags.writeable = False
        m.flags.writeable = False
        object.__setattr__(self, "support", s)
        object.__setattr__(self, "masses", m)

    def mean(self) -> float:
        return float(np.dot(self.support, self.masses))


def shifted_poisson_xi(theta: float, x0: int, eps: int) -> float:
    """Density of the error x - x0 under a Poisson simulation at rate theta.

    A Poisson pmf shifted by -x0; zero whenever x0 + eps < 0, with no
    truncation or renormalization over x0.
    """
    if theta <= 0:
        raise InputError("theta must be positive")
    x = x0 + eps
    if x < 0:
        return 0.0
    return float(stats.poisson.pmf(x, theta))


def gaussian_prior_predictive_error(
    theta_star: float, h2: float, x0: float, model_variance: float = 1.0
) -> GaussianErrorLaw:
    """Law of the error x - x0 when theta is drawn from the N(theta*, h2) prior."""
    if h2 < 0:
        raise InputError("h2 must be nonnegative")
    return GaussianErrorLaw(theta_star - x0, h2 + model_variance)


def gaussian_fitted_posterior_error(
    theta_star: float, h2: float, x0: float, tau: float, model_variance: float = 1.0
) -> GaussianErrorLaw:
    """Posterior error law: prior predictive times the N(0, tau^2) kernel.

    Product of two Gaussians; its variance is always below the prior
    predictive variance and its mean is pulled toward zero.
    """
    if tau <= 0:
        raise InputError("tau must be positive")
    if h2 < 0:
        raise InputError("h2 must be nonnegative")
    t2 = tau * tau
    v = h2 + model_variance
    return GaussianErrorLaw(t2 * (theta_star - x0) / (t2 + v), v * t2 / (t2 + v))


def approx_bayes_factor(x0: float, theta_star: float, h2: float, tau2: float) -> float:
    """Kernel-smoothed marginal-likelihood ratio of the variance-3 vs variance-1
    Gaussian location models under a shared N(theta*, h2) prior.

    The exponent uses the squared centered observation (theta* - x0)^2,
    which is what the Gaussian-convolution integral gives.
    """
    if h2 < 0 or tau2 < 0:
        raise InputError("h2 and tau2 must be nonnegative")
    a = tau2 + h2 + 1.0
    b = tau2 + h2 + 3.0
    d2 = (theta_star - x0) ** 2
    return math.sqrt(a / b) * math.exp(d2 / (a * b))


def poisson_posterior_error(x0: int, tau: float, tail: float = 1e-13) -> DiscretePmf:
    """Posterior error pmf of the Poisson model under the 2^(-|e|/tau) kernel.

    Masses are proportional to 2^-(x0 + e + |e|/tau + 1) on e >= -x0,
    normalized, with the geometric tail truncated once it is negligible.
    """
    if x0 < 0:
        raise InputError("x0 must be a nonnegative integer")
    if tau <= 0:
        raise InputError("tau must be positive")
    inv_tau = 0.0 if math.isinf(tau) else 1.0 / tau

    def log2_term(e):
        return -(x0 + e + abs(e) * inv_tau + 1.0)

    support = [-x0]
    logs = [log2_term(-x0)]
    # ratio of successive terms is constant once e >= 0
    ratio = 2.0 ** (-(1.0 + inv_tau))
    e = -x0
    while True:
        e += 1
        support.append(e)
        logs.append(log2_term(e))
        if e >= 1:
            term = 2.0 ** logs[-1]
            tail_bound = term * ratio / (1.0 - ratio)
            if tail_bound < tail * 2.0 ** max(logs):
                break
    masses = np.power(2.0, np.array(logs))
    masses /= masses.sum()
    return DiscretePmf(np.array(support, dtype=int), masses)


def poisson_marginal_likelihood(x0: int, tau: float) -> float:
    """Normalizing constant of the Poisson posterior error pmf, closed form.

    The bracket has a removable singularity at tau = 1, replaced by its
    limit x0 inside a small guard band.
    """
    if x0 < 0:
        raise InputError("x0 must be a nonnegative integer")
    if tau <= 0:
        raise InputError("tau must be positive")
    inv_tau = 0.0 if math.isinf(tau) else 1.0 / tau
    a = 1.0 - inv_tau
    if x0 > 0:
        if abs(a) < 1e-8:
            bracket = float(x0)
        else:
            q = 2.0**a
            bracket = (1.0 - q ** (x0 + 1)) / (1.0 - q) - 1.0
    else:
        bracket = 0.0
    positive_tail = 1.0 / (1.0 - 2.0 ** (-1.0 - inv_tau))
    return 2.0 ** (-(x0 + 1.0)) * (bracket + positive_tail)


def poisson_bruteforce_target(
    theta_grid, x_max: int, x0: int, tau: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Fully enumerated joint (theta, eps) target on a discretized problem.

    Returns ``(theta_grid, eps_support, joint)`` where ``joint[i, j]`` is
    the normalized mass at (theta_grid[i], eps_support[j]); the prior over
    the grid is the discretized unit-rate Exponential.  Raises when the
    Poisson tail beyond ``x_max`` is not negligible.
    """
    theta_grid = np.asarray(theta_grid, dtype=float)
    if x0 < 0 or x_max <= x0:
        raise InputError("need 0 <= x0 < x_max")
    if tau <= 0:
        raise InputError("tau must be positive")
    tail = stats.poisson.sf(x_max, theta_grid.max())
    if tail >= 1e-10:
        raise TailMassError(
            f"Poisson tail mass beyond x_max={x_max} is {tail:.3e} (>= 1e-10)"
        )
    inv_tau = 0.0 if math.isinf(tau) else 1.0 / tau
    xs = np.arange(0, x_max + 1)
    eps_support = xs - x0
    prior = np.exp(-theta_grid)
    lik = stats.poisson.pmf(xs[None, :], theta_grid[:, None])
    kernel = 2.0 ** (-np.abs(eps_support) * inv_tau)
    joint = prior[:, None] * lik * kernel[None, :]
    joint /= joint.sum()
    return theta_grid, eps_support, joint
