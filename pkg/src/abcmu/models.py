"""Builtin data-generating processes, priors, summaries and named presets.

Each factory returns a :class:`~abcmu.core.GenerativeModel` whose
``simulate`` is deterministic in ``(theta, seed)``.  The presets bundle a
model, a summary pipeline, a kernel family and the observed-data recipe
under a string key addressable from the CLI.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats

from . import accel
from .core import Dataset, DiscrepancyPipeline, GenerativeModel, PriorSpec
from .errors import ConfigurationError, InputError
from .rng import make_rng

# ---------------------------------------------------------------------------
# summaries

_SUMMARY_KINDS = ("mean", "median", "sd", "symm", "quantile")


def summary_fn(kind: str, p: float | None = None) -> Callable[[np.ndarray], float]:
    """Return the named summary statistic as a plain array function."""
    if kind == "mean":
        return accel.mean
    if kind == "median":
        return accel.median
    if kind == "sd":
        return accel.sd
    if kind == "symm":
        return accel.symm
    if kind == "quantile":
        if p is None or not 0.0 < p < 1.0:
            raise ConfigurationError("quantile summary needs 0 < p < 1")
        return lambda x, _p=float(p): accel.quantile(x, _p)
    raise ConfigurationError(f"unknown summary kind {kind!r}; choose from {_SUMMARY_KINDS}")


def builtin_summary(kind: str, data: Dataset, p: float | None = None) -> float:
    """Evaluate a named summary statistic on a dataset."""
    if data.size < 1:
        raise InputError("dataset is empty")
    return float(summary_fn(kind, p)(data.observations))


def make_pipeline(kinds, observed: Dataset) -> DiscrepancyPipeline:
    """Build a signed-difference pipeline from summary kind names.

    A quantile summary is spelled ``"quantile:0.25"``.
    """
    fns, names = [], []
    for kind in kinds:
        if kind.startswith("quantile:"):
            p = float(kind.split(":", 1)[1])
            fns.append(summary_fn("quantile", p))
            names.append(f"q{p:g}")
        else:
            fns.append(summary_fn(kind))
            names.append(kind)
    return DiscrepancyPipeline(fns, names, observed)


# ---------------------------------------------------------------------------
# observed data


@dataclass(frozen=True)
class ExponentialDataSource:
    """Recipe for the observed dataset: n i.i.d. Exponential(rate) draws."""

    rate: float = 0.2
    n: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.rate <= 0:
            raise ConfigurationError("exponential rate must be positive")
        if self.n < 1:
            raise ConfigurationError("need at least one observation")


def make_observed_dataset(source: ExponentialDataSource) -> Dataset:
    """Generate the observed dataset; bit-exact in the source seed."""
    rng = make_rng(source.seed)
    return Dataset(rng.exponential(1.0 / source.rate, source.n))


# ---------------------------------------------------------------------------
# models


def make_poisson_model() -> GenerativeModel:
    """Poisson rate model with a unit-rate Exponential prior (one observation)."""

    def sample(rng):
        return np.array([rng.exponential(1.0)])

    def density(theta):
        t = theta[0]
        return math.exp(-t) if t >= 0 else 0.0

    def simulate(theta, seed):
        return Dataset([float(make_rng(seed).poisson(theta[0]))])

    prior = PriorSpec(sample, density, lambda th: th[0] >= 0, scale=np.array([1.0]))
    return GenerativeModel(simulate, prior, 1, "poisson", ("rate",))


def make_poisson_grid_model(grid) -> GenerativeModel:
    """Poisson model with the unit-rate prior discretized to a theta grid."""
    grid = np.asarray(grid, dtype=float)
    weights = np.exp(-grid)
    weights = weights / weights.sum()

    def sample(rng):
        return np.array([grid[rng.choice(grid.size, p=weights)]])

    def density(theta):
        hit = np.isclose(grid, theta[0], rtol=0, atol=1e-9)
        return float(np.exp(-theta[0])) if np.any(hit) else 0.0

    def simulate(theta, seed):
        return Dataset([float(make_rng(seed).poisson(theta[0]))])

    prior = PriorSpec(
        sample, density, lambda th: density(th) > 0, scale=np.array([np.ptp(grid)])
    )
    return GenerativeModel(simulate, prior, 1, "poisson-grid", ("rate",))


def make_gaussian_location_model(
    theta_star: float, h2: float, variance: float = 1.0, n: int = 1
) -> GenerativeModel:
    """Gaussian model with unknown mean, fixed variance, Gaussian prior on the mean."""
    if variance <= 0:
        raise ConfigurationError("model variance must be positive")
    if h2 < 0:
        raise ConfigurationError("prior variance must be nonnegative")
    h = math.sqrt(h2)
    sd = math.sqrt(variance)

    def sample(rng):
        return np.array([theta_star + h * rng.standard_normal()])

    def density(theta):
        if h2 == 0:
            return 1.0 if theta[0] == theta_star else 0.0
        z = (theta[0] - theta_star) / h
        return math.exp(-0.5 * z * z)

    def simulate(theta, seed):
        return Dataset(make_rng(seed).normal(theta[0], sd, n))

    prior = PriorSpec(sample, density, lambda th: True, scale=np.array([max(h, 1e-12)]))
    label = "gaussian-location" if variance == 1.0 else f"gaussian-location-v{variance:g}"
    return GenerativeModel(simulate, prior, 1, label, ("mu",))


@dataclass(frozen=True)
class M3Hyper:
    """Hyperparameters of the two-parameter Gaussian model's priors."""

    mu0: float
    alpha0: float
    beta0: float
    tau0: float = 0.0  # half-width of the uniform mean prior (independent variant)
    n0: float = 1.0  # prior precision multiplier (conjugate variant)


def _ig_density(s2: float, alpha0: float, beta0: float) -> float:
    if s2 <= 0:
        return 0.0
    return (
        beta0**alpha0
        * s2 ** (-(alpha0 + 1.0))
        * math.exp(-beta0 / s2)
        / math.gamma(alpha0)
    )


def prior_density_m3(variant: str, theta: np.ndarray, hyper: M3Hyper) -> float:
    """Unnormalized prior density of (mu, sigma^2) for either prior variant.

    Returns 0 outside the support (including sigma^2 <= 0) instead of
    raising, so random-walk samplers can reject out-of-support proposals.
    """
    if hyper.alpha0 <= 0 or hyper.beta0 <= 0:
        raise ConfigurationError("inverse-gamma hyperparameters must be positive")
    mu, s2 = float(theta[0]), float(theta[1])
    if variant == "independent":
        if hyper.tau0 <= 0:
            raise ConfigurationError("uniform mean prior needs tau0 > 0")
        if abs(mu - hyper.mu0) > hyper.tau0:
            return 0.0
        return _ig_density(s2, hyper.alpha0, hyper.beta0)
    if variant == "conjugate":
        if hyper.n0 <= 0:
            raise ConfigurationError("conjugate prior needs n0 > 0")
        if s2 <= 0:
            return 0.0
        ig = _ig_density(s2, hyper.alpha0, hyper.beta0)
        z = (mu - hyper.mu0) / math.sqrt(s2 / hyper.n0)
        return ig * math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi * s2 / hyper.n0)
    raise ConfigurationError(f"unknown prior variant {variant!r}")


def _ig_scale(alpha0: float, beta0: float) -> float:
    # interquartile range; the shipped configs include infinite-variance cases
    q = stats.invgamma(alpha0, scale=beta0).ppf([0.25, 0.75])
    return float(q[1] - q[0])


def make_gaussian_two_param_model(
    variant: str, hyper: M3Hyper, n: int = 100
) -> GenerativeModel:
    """Gaussian model with unknown mean and variance under either prior variant.

    The inverse-gamma draw goes through 1/Gamma so it stays well defined
    even for infinite-variance configurations such as alpha0=2.
    """

    def density(theta):
        return prior_density_m3(variant, theta, hyper)

    if variant == "independent":

        def sample(rng):
            mu = hyper.mu0 + hyper.tau0 * (2.0 * rng.random() - 1.0)
            s2 = hyper.beta0 / rng.standard_gamma(hyper.alpha0)
            return np.array([mu, s2])

        scale = np.array([2.0 * hyper.tau0, _ig_scale(hyper.alpha0, hyper.beta0)])
    elif variant == "conjugate":

        def sample(rng):
            s2 = hyper.beta0 / rng.standard_gamma(hyper.alpha0)
            mu = rng.normal(hyper.mu0, math.sqrt(s2 / hyper.n0))
            return np.array([mu, s2])

        mu_scale = math.sqrt(
            stats.invgamma(hyper.alpha0, scale=hyper.beta0).median() / hyper.n0
        )
        scale = np.array([mu_scale, _ig_scale(hyper.alpha0, hyper.beta0)])
    else:
        raise ConfigurationError(f"unknown prior variant {variant!r}")

    def simulate(theta, seed):
        mu, s2 = theta[0], theta[1]
        if s2 < 0:
            raise InputError("sigma^2 must be nonnegative in simulate")
        return Dataset(make_rng(seed).normal(mu, math.sqrt(s2), n))

    prior = PriorSpec(sample, density, lambda th: density(th) > 0, scale=scale)
    return GenerativeModel(
        simulate, prior, 2, f"gaussian-2p-{variant}", ("mu", "sigma2")
    )


# ---------------------------------------------------------------------------
# presets

DEFAULT_DATA_SEED = 10
"""Seed of the shipped Exponential observed dataset.

Chosen so the sample's mean-median gap (~1.36) stays below the narrow
box-kernel width, keeping those experiments inside their feasible region.
"""

EX3_DATA_SEED = 8
"""Seed used by the two location-model presets.

Chosen so the sample's mean-median gap (~2.18) is wide enough that the
mean-error interval sits clearly away from zero in the flat-prior regime.
"""


@dataclass(frozen=True)
class Preset:
    """A named, fully parameterized experiment family."""

    label: str
    model_factory: Callable[[], GenerativeModel]
    summaries: tuple[str, ...]
    kernel_family: str
    tau: tuple[float, ...]
    proposal_scales: tuple[float, ...] | None = None
    data: ExponentialDataSource = ExponentialDataSource(seed=DEFAULT_DATA_SEED)


def _m2_factory(theta_star, h2):
    return lambda: make_gaussian_location_model(theta_star, h2, variance=1.0, n=100)


def _m3_factory(variant, **hyper):
    return lambda: make_gaussian_two_param_model(variant, M3Hyper(**hyper))


PRESETS: dict[str, Preset] = {
    # tight, misplaced prior on the Gaussian mean
    "ex3-tight": Preset(
        "ex3-tight",
        _m2_factory(theta_star=0.0, h2=0.1),
        ("mean", "median"),
        "laplace",
        (0.1, 0.1),
        proposal_scales=(0.2,),
        data=ExponentialDataSource(seed=EX3_DATA_SEED),
    ),
    # essentially flat prior on the Gaussian mean
    "ex3-flat": Preset(
        "ex3-flat",
        _m2_factory(theta_star=5.0, h2=100000.0),
        ("mean", "median"),
        "laplace",
        (0.1, 0.1),
        proposal_scales=(0.25,),
        data=ExponentialDataSource(seed=EX3_DATA_SEED),
    ),
    # two-parameter Gaussian, very wide uniform mean prior
    # (mu0/alpha0/beta0 carried over from the base setup: an assumption)
    "ex5-figA": Preset(
        "ex5-figA",
        _m3_factory("independent", mu0=5.0, tau0=1000.0, alpha0=4.0, beta0=75.0),
        ("mean", "median"),
        "uniform-box",
        (1.6, 1.6),
        proposal_scales=(0.6, 12.0),
    ),
    # two-parameter Gaussian, extremely broad priors on both coordinates
    "ex5-figB": Preset(
        "ex5-figB",
        _m3_factory("independent", mu0=5.0, tau0=1000.0, alpha0=2.0, beta0=1000.0),
        ("mean", "median"),
        "uniform-box",
        (1.6, 1.6),
        proposal_scales=(0.6, 400.0),
    ),
    # conjugate normal-inverse-gamma prior, symmetry summary
    "appendix": Preset(
        "appendix",
        _m3_factory("conjugate", mu0=5.0, n0=1.0, alpha0=4.0, beta0=75.0),
        ("symm",),
        "uniform-box",
        (1.0,),
        proposal_scales=(3.0, 40.0),
    ),
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown preset {name!r}; available: {sorted(PRESETS)}"
        ) from None
