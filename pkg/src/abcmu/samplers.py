"""Monte Carlo engines targeting the joint (theta, error) posterior.

``run_rejection`` draws from the prior and thins by kernel weight;
``run_mcmc`` is a Metropolis-Hastings random walk over theta whose
acceptance ratio multiplies the prior ratio by the kernel-weight ratio of
the freshly simulated errors.  Both record every retained state's error
vector, which is what the model-criticism diagnostics consume.
``run_prior_predictive`` / ``run_app`` / ``run_wapp`` produce the
prior-predictive, approximate-posterior-predictive and weighted-APP error
samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .core import AbcKernel, DiscrepancyPipeline, GenerativeModel, PriorSpec
from .errors import (
    BudgetExhaustedError,
    ConfigurationError,
    DegenerateWeightsError,
    InputError,
    InvariantBreachError,
    NumericalFaultError,
)
from .rng import make_rng, next_seed, spawn_seeds


@dataclass(frozen=True)
class ChainState:
    """One augmented state: parameters, their error vector, bookkeeping."""

    theta: np.ndarray
    eps: np.ndarray
    accepted: bool
    iteration: int


@dataclass(frozen=True)
class ProposalSpec:
    """Symmetric random-walk proposal.

    ``gaussian`` adds independent Gaussian steps per coordinate;
    ``lattice`` adds +-step per coordinate with equal probability (for
    grid-valued parameters).  Both satisfy q(a->b) = q(b->a).
    """

    family: str = "gaussian"
    step_scales: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.family not in ("gaussian", "lattice"):
            raise ConfigurationError(f"unknown proposal family {self.family!r}")
        arr = np.asarray(self.step_scales, dtype=float)
        if arr.ndim == 0:
            arr = arr.reshape(1)
        if np.any(~np.isfinite(arr)) or np.any(arr <= 0):
            raise ConfigurationError("proposal step scales must be positive")
        arr.flags.writeable = False
        object.__setattr__(self, "step_scales", arr)

    def propose(self, rng: np.random.Generator, theta: np.ndarray) -> np.ndarray:
        if self.family == "gaussian":
            return theta + self.step_scales * rng.standard_normal(theta.size)
        signs = np.where(rng.random(theta.size) < 0.5, -1.0, 1.0)
        return theta + self.step_scales * signs


def default_proposal(model: GenerativeModel) -> ProposalSpec:
    """Gaussian walk with steps at 10% of each prior's scale measure."""
    if model.prior.scale is None:
        raise ConfigurationError(
            f"model {model.label!r} carries no prior scale; pass a ProposalSpec"
        )
    return ProposalSpec("gaussian", 0.1 * model.prior.scale)


@dataclass(frozen=True)
class RunConfig:
    iterations: int
    seed: int
    burn_in_fraction: float = 0.2
    n_chains: int = 1
    thin: int = 1

    def __post_init__(self):
        if self.iterations < 1:
            raise ConfigurationError("iterations must be >= 1")
        if not 0.0 <= self.burn_in_fraction < 1.0:
            raise ConfigurationError("burn_in_fraction must lie in [0, 1)")
        if self.thin < 1:
            raise ConfigurationError("thin must be >= 1")
        if self.n_chains < 1:
            raise ConfigurationError("n_chains must be >= 1")


@dataclass
class Chain:
    """Ordered record of augmented states from one sampler run."""

    thetas: np.ndarray  # (n, theta_dim)
    eps: np.ndarray  # (n, K)
    accepted: np.ndarray  # (n,) bool
    acceptance_rate: float
    config: RunConfig
    model_label: str
    kernel_desc: str
    summary_names: tuple[str, ...]
    theta_names: tuple[str, ...] = ()

    def __len__(self) -> int:
        return self.thetas.shape[0]

    def states(self) -> Iterator[ChainState]:
        for i in range(len(self)):
            yield ChainState(self.thetas[i], self.eps[i], bool(self.accepted[i]), i)

    @property
    def burn_in(self) -> int:
        return int(self.config.burn_in_fraction * len(self))

    def post_burn_in(self) -> tuple[np.ndarray, np.ndarray]:
        """(thetas, eps) after burn-in discard and thinning."""
        s = slice(self.burn_in, None, self.config.thin)
        return self.thetas[s], self.eps[s]


def _kernel_desc(kernel: AbcKernel) -> str:
    return f"{kernel.family}(tau={np.array2string(kernel.tau, precision=6)})"


# ---------------------------------------------------------------------------
# state initialization


def init_state(
    model: GenerativeModel,
    pipeline: DiscrepancyPipeline,
    kernel: AbcKernel,
    seed: int,
    budget: int = 100_000,
) -> ChainState:
    """Find a starting state with positive kernel weight by prior retries."""
    if budget < 1:
        raise ConfigurationError("initialization budget must be >= 1")
    rng = make_rng(seed)
    for attempt in range(budget):
        theta = model.prior.sample(rng)
        data = model.simulate(theta, next_seed(rng))
        eps = pipeline.errors_of(data)
        if kernel.weight(eps) > 0.0:
            return ChainState(theta, eps, True, 0)
    raise BudgetExhaustedError(
        f"no prior draw achieved positive kernel weight in {budget} attempts; "
        "consider a larger kernel scale tau",
        attempts=budget,
    )


# ---------------------------------------------------------------------------
# Metropolis-Hastings


def mh_ratio(
    prior: PriorSpec,
    kernel: AbcKernel,
    proposal: ProposalSpec,
    current: ChainState,
    candidate: ChainState,
) -> float:
    """Acceptance ratio for the shipped symmetric proposals.

    The proposal terms cancel, leaving prior ratio times kernel-weight
    ratio; the acceptance probability is min(1, ratio).
    """
    cur_weight = kernel.weight(current.eps)
    if cur_weight <= 0.0:
        raise InvariantBreachError("current state has zero kernel weight")
    cand_prior = prior.density(candidate.theta)
    if cand_prior == 0.0:
        return 0.0
    ratio = (cand_prior * kernel.weight(candidate.eps)) / (
        prior.density(current.theta) * cur_weight
    )
    if not np.isfinite(ratio):
        raise NumericalFaultError(
            f"non-finite acceptance ratio; current={current}, candidate={candidate}"
        )
    return float(ratio)


def run_mcmc(
    model: GenerativeModel,
    pipeline: DiscrepancyPipeline,
    kernel: AbcKernel,
    proposal: ProposalSpec | None = None,
    config: RunConfig = None,
    initial: ChainState | None = None,
) -> Chain:
    """Random-walk Metropolis-Hastings over the augmented state space.

    Every iteration re-simulates at the proposed parameters; on acceptance
    the stored error vector is the fresh simulation's discrepancy, on
    rejection the previous state is carried over unchanged.
    """
    if config is None:
        raise ConfigurationError("run_mcmc needs a RunConfig")
    if proposal is None:
        proposal = default_proposal(model)

    rng = make_rng(config.seed)
    if initial is None:
        initial = init_state(model, pipeline, kernel, next_seed(rng))

    n = config.iterations
    thetas = np.empty((n, model.theta_dim))
    eps = np.empty((n, pipeline.k))
    accepted = np.zeros(n, dtype=bool)

    prior_density = model.prior.density
    weight = kernel.weight

    cur_theta = initial.theta
    cur_eps = initial.eps
    cur_val = prior_density(cur_theta) * weight(cur_eps)
    if cur_val <= 0.0:
        raise InvariantBreachError("initial state has zero target weight")

    n_accept = 0
    for i in range(n):
        cand_theta = proposal.propose(rng, cur_theta)
        cand_prior = prior_density(cand_theta)
        if cand_prior > 0.0:
            data = model.simulate(cand_theta, next_seed(rng))
            cand_eps = pipeline.errors_of(data)
            cand_val = cand_prior * weight(cand_eps)
            ratio = cand_val / cur_val
            if not np.isfinite(ratio):
                raise NumericalFaultError(
                    f"non-finite acceptance ratio at iteration {i}: "
                    f"theta={cur_theta}, candidate={cand_theta}, "
                    f"eps={cur_eps}, candidate eps={cand_eps}"
                )
            if ratio >= 1.0 or rng.random() < ratio:
                cur_theta, cur_eps, cur_val = cand_theta, cand_eps, cand_val
                accepted[i] = True
                n_accept += 1
        thetas[i] = cur_theta
        eps[i] = cur_eps

    return Chain(
        thetas,
        eps,
        accepted,
        n_accept / n,
        config,
        model.label,
        _kernel_desc(kernel),
        pipeline.names,
        model.theta_names,
    )


def run_mcmc_chains(
    model: GenerativeModel,
    pipeline: DiscrepancyPipeline,
    kernel: AbcKernel,
    proposal: ProposalSpec | None = None,
    config: RunConfig = None,
) -> list[Chain]:
    """Run ``config.n_chains`` chains from overdispersed (independent) starts.

    Each chain gets its own child seed, so results do not depend on
    execution order.
    """
    seeds = spawn_seeds(config.seed, config.n_chains)
    chains = []
    for s in seeds:
        chain_cfg = RunConfig(
            config.iterations, s, config.burn_in_fraction, 1, config.thin
        )
        chains.append(run_mcmc(model, pipeline, kernel, proposal, chain_cfg))
    return chains


# ---------------------------------------------------------------------------
# rejection sampling


def run_rejection(
    model: GenerativeModel,
    pipeline: DiscrepancyPipeline,
    kernel: AbcKernel,
    config: RunConfig,
    max_attempts: int | None = None,
) -> Chain:
    """Accept prior-predictive draws with probability weight(eps)/weight(0).

    For the uniform-box family this reduces to accepting exactly when all
    errors fall inside the box.  Retained pairs are exact draws from the
    joint (theta, eps) target, no kernel normalization needed.
    """
    if max_attempts is None:
        max_attempts = 1000 * config.iterations
    rng = make_rng(config.seed)
    weight0 = kernel.weight(np.zeros(pipeline.k))
    if weight0 <= 0.0:
        raise ConfigurationError("kernel weight at zero must be positive")

    thetas, eps_rows = [], []
    attempts = 0
    while len(thetas) < config.iterations and attempts < max_attempts:
        attempts += 1
        theta = model.prior.sample(rng)
        data = model.simulate(theta, next_seed(rng))
        eps = pipeline.errors_of(data)
        w = kernel.weight(eps)
        if w <= 0.0:
            continue
        if w >= weight0 or rng.random() < w / weight0:
            thetas.append(theta)
            eps_rows.append(eps)

    if not thetas:
        raise BudgetExhaustedError(
            f"no acceptances in {attempts} simulations; "
            "consider a larger kernel scale tau",
            attempts=attempts,
        )

    n = len(thetas)
    return Chain(
        np.array(thetas),
        np.array(eps_rows),
        np.ones(n, dtype=bool),
        n / attempts,
        config,
        model.label,
        _kernel_desc(kernel),
        pipeline.names,
        model.theta_names,
    )


# ---------------------------------------------------------------------------
# predictive error samplers


def run_prior_predictive(
    model: GenerativeModel,
    pipeline: DiscrepancyPipeline,
    n_draws: int,
    seed: int,
) -> np.ndarray:
    """Exact draws from the prior predictive error density, shape (n, K)."""
    if n_draws < 1:
        raise InputError("n_draws must be >= 1")
    rng = make_rng(seed)
    out = np.empty((n_draws, pipeline.k))
    for i in range(n_draws):
        theta = model.prior.sample(rng)
        data = model.simulate(theta, next_seed(rng))
        out[i] = pipeline.errors_of(data)
    return out


def run_app(
    posterior_thetas: np.ndarray,
    model: GenerativeModel,
    pipeline: DiscrepancyPipeline,
    n_draws: int,
    seed: int,
) -> np.ndarray:
    """Approximate posterior predictive error draws.

    Parameters are resampled uniformly from ``posterior_thetas`` (rows),
    then each is pushed through the simulator and the pipeline.
    """
    thetas = np.atleast_2d(np.asarray(posterior_thetas, dtype=float))
    if thetas.shape[0] < 1:
        raise InputError("posterior theta sample is empty")
    if n_draws < 1:
        raise InputError("n_draws must be >= 1")
    rng = make_rng(seed)
    out = np.empty((n_draws, pipeline.k))
    for i in range(n_draws):
        theta = thetas[rng.integers(thetas.shape[0])]
        data = model.simulate(theta, next_seed(rng))
        out[i] = pipeline.errors_of(data)
    return out


@dataclass(frozen=True)
class WeightedSample:
    """Error draws with nonnegative weights (not normalized)."""

    draws: np.ndarray  # (n, K)
    weights: np.ndarray  # (n,)


def run_wapp(app_draws: np.ndarray, kernel: AbcKernel) -> WeightedSample:
    """Attach kernel weights to APP draws, giving the weighted-APP sample."""
    draws = np.atleast_2d(np.asarray(app_draws, dtype=float))
    if draws.shape[0] < 1:
        raise InputError("APP sample is empty")
    weights = np.array([kernel.weight(row) for row in draws])
    if not np.any(weights > 0.0):
        raise DegenerateWeightsError(
            "all kernel weights are zero; tau is too stringent for the "
            "re-simulation volatility"
        )
    return WeightedSample(draws, weights)
