"""End-to-end acceptance suite.

Each test covers one numbered claim about the toolkit; running with
``pytest -v`` yields one pass/fail line per criterion.  Seeds are pinned
so every check is deterministic.
"""

import json
import math
import time

import numpy as np
import pytest
from scipy import integrate, stats

from abcmu import (
    AbcKernel,
    Dataset,
    DiscrepancyPipeline,
    ProposalSpec,
    RunConfig,
    approx_bayes_factor,
    distribution_distance,
    get_preset,
    heat_grid_2d,
    make_gaussian_location_model,
    make_observed_dataset,
    make_pipeline,
    make_poisson_grid_model,
    make_poisson_model,
    make_rng,
    poisson_bruteforce_target,
    poisson_marginal_likelihood,
    poisson_posterior_error,
    posterior_mean_error,
    run_app,
    run_mcmc,
    run_mcmc_chains,
    run_prior_predictive,
    run_rejection,
    run_wapp,
)
from abcmu.cli import main
from abcmu.diagnostics import convergence_and_ess, weighted_quantile


def _report(criterion: int, description: str, passed: bool, detail: str = ""):
    status = "PASS" if passed else "FAIL"
    print(f"CRITERION {criterion:02d} {status}: {description} {detail}".rstrip())
    assert passed, f"criterion {criterion}: {description} {detail}"


def _warm_up_jit():
    """Trigger any just-in-time compilation before wall-clock timing."""
    model = make_poisson_model()
    pipe = make_pipeline(["mean"], Dataset([3.0]))
    kernel = AbcKernel("discrete-geometric", [1.0])
    run_mcmc(model, pipe, kernel, None, RunConfig(50, 0))
    glm = make_gaussian_location_model(0.0, 9.0)
    gp = make_pipeline(["mean"], Dataset([5.0]))
    run_mcmc(glm, gp, AbcKernel("gaussian", [math.sqrt(10.0)]), None, RunConfig(50, 0))


def test_criterion_01_poisson_sampler_exactness():
    grid = np.arange(0.25, 12.25, 0.25)
    x0, tau = 3, 1.0
    model = make_poisson_grid_model(grid)
    pipe = make_pipeline(["mean"], Dataset([float(x0)]))
    kernel = AbcKernel("discrete-geometric", [tau])
    proposal = ProposalSpec("lattice", np.array([0.25]))

    _warm_up_jit()
    start = time.perf_counter()
    chain = run_mcmc(model, pipe, kernel, proposal, RunConfig(200_000, 17))
    elapsed = time.perf_counter() - start

    tg, errs, joint = poisson_bruteforce_target(grid, x_max=60, x0=x0, tau=tau)
    thetas, eps = chain.post_burn_in()
    ti = np.round((thetas[:, 0] - grid[0]) / 0.25).astype(int)
    ei = np.round(eps[:, 0]).astype(int) - int(errs[0])
    counts = np.zeros_like(joint)
    inside = (
        (ti >= 0)
        & (ti < grid.size)
        & (ei >= 0)
        & (ei < errs.size)
    )
    np.add.at(counts, (ti[inside], ei[inside]), 1.0)
    emp = counts / thetas.shape[0]
    outside = 1.0 - inside.mean()
    tv = 0.5 * (np.abs(emp - joint).sum() + outside)

    _report(
        1,
        "grid-prior Poisson sampler matches the enumerated joint target",
        tv <= 0.05 and elapsed < 30.0,
        f"(TV={tv:.4f}, {elapsed:.1f}s)",
    )


def test_criterion_02_poisson_marginal_likelihood_closed_form():
    def bruteforce(x0, tau, e_max=3000):
        inv = 0.0 if math.isinf(tau) else 1.0 / tau
        return sum(
            2.0 ** (-(x0 + e + abs(e) * inv + 1.0)) for e in range(-x0, e_max + 1)
        )

    taus = (0.5, 1.0, 2.0 / 3.0, 2.0, 10.0)
    worst = 0.0
    monotone = True
    for tau in taus:
        values = []
        for x0 in range(21):
            got = poisson_marginal_likelihood(x0, tau)
            want = bruteforce(x0, tau)
            worst = max(worst, abs(got - want) / want)
            values.append(got)
        monotone &= all(b < a for a, b in zip(values, values[1:]))
    _report(
        2,
        "marginal likelihood matches brute force and decreases in x0",
        worst <= 1e-10 and monotone,
        f"(worst rel err={worst:.2e}, monotone={monotone})",
    )


def test_criterion_03_gaussian_fitted_model_oracle():
    model = make_gaussian_location_model(0.0, 9.0)
    pipe = make_pipeline(["mean"], Dataset([5.0]))
    kernel = AbcKernel("gaussian", [math.sqrt(10.0)])

    _warm_up_jit()
    start = time.perf_counter()
    chain = run_mcmc(model, pipe, kernel, None, RunConfig(100_000, 21))
    elapsed = time.perf_counter() - start

    mean, mcse = posterior_mean_error(chain)
    _, eps = chain.post_burn_in()
    var = float(eps[:, 0].var())
    mean_ok = abs(mean[0] - (-2.5)) <= 3 * mcse[0]
    var_ok = abs(var - 5.0) <= 0.5
    _report(
        3,
        "fitted Gaussian error moments match the closed form",
        mean_ok and var_ok and elapsed < 20.0,
        f"(mean={mean[0]:.3f}±{3 * mcse[0]:.3f} vs -2.5, var={var:.3f} vs 5, {elapsed:.1f}s)",
    )


def test_criterion_04_flat_prior_limit():
    model = make_gaussian_location_model(0.0, 1e6)
    pipe = make_pipeline(["mean"], Dataset([5.0]))
    tau = math.sqrt(10.0)
    kernel = AbcKernel("gaussian", [tau])
    proposal = ProposalSpec("gaussian", np.array([3.0]))
    chain = run_mcmc(model, pipe, kernel, proposal, RunConfig(100_000, 21))
    _, eps = chain.post_burn_in()

    from abcmu.oracles import GaussianErrorLaw

    tv = distribution_distance(GaussianErrorLaw(0.0, tau * tau), eps[:, 0])
    _report(
        4,
        "flat-prior error marginal matches the kernel law N(0, tau^2)",
        tv <= 0.05,
        f"(TV={tv:.4f})",
    )


def test_criterion_05_bayes_factor_quadrature():
    rng = make_rng(99)
    worst = 0.0
    for _ in range(100):
        x0 = float(rng.uniform(-3, 3))
        theta_star = float(rng.uniform(-3, 3))
        h2 = float(rng.uniform(0.1, 10))
        tau2 = float(rng.uniform(0.1, 10))
        h = math.sqrt(h2)

        def marglik(model_var):
            f = lambda t: stats.norm.pdf(
                x0, t, math.sqrt(model_var + tau2)
            ) * stats.norm.pdf(t, theta_star, h)
            return integrate.quad(f, theta_star - 12 * h, theta_star + 12 * h, limit=200)[0]

        want = marglik(3.0) / marglik(1.0)
        got = approx_bayes_factor(x0, theta_star, h2, tau2)
        worst = max(worst, abs(got - want) / want)
    flat_gap = abs(approx_bayes_factor(2.0, 0.0, 1e8, 1.0) - 1.0)
    _report(
        5,
        "Bayes factor matches quadrature and tends to one for a flat prior",
        worst <= 1e-6 and flat_gap < 1e-3,
        f"(worst rel err={worst:.2e}, |B-1| at h2=1e8: {flat_gap:.2e})",
    )


def test_criterion_06_exponential_data_mismatch_detection():
    ok = True
    details = []
    for preset_name in ("ex3-tight", "ex3-flat"):
        preset = get_preset(preset_name)
        model = preset.model_factory()
        obs = make_observed_dataset(preset.data)
        pipe = make_pipeline(list(preset.summaries), obs)
        kernel = AbcKernel(preset.kernel_family, list(preset.tau))
        proposal = ProposalSpec("gaussian", np.array(preset.proposal_scales))
        cfg = RunConfig(10_000, 43, n_chains=4)
        chains = run_mcmc_chains(model, pipe, kernel, proposal, cfg)
        conv = convergence_and_ess(chains)
        rhat_max = float(conv.rhat.max())
        pooled = np.vstack([c.post_burn_in()[1] for c in chains])
        lo, hi = weighted_quantile(pooled[:, 0], [0.025, 0.975])
        excluded = not (lo <= 0.0 <= hi)
        ok &= rhat_max < 1.1 and excluded
        details.append(
            f"{preset_name}: rhat={rhat_max:.3f}, eps_mean 95%=[{lo:.3f},{hi:.3f}]"
        )
    _report(
        6,
        "both mismatch presets converge and exclude zero",
        ok,
        "(" + "; ".join(details) + ")",
    )


def _run_figB(tau: float, seed: int = 2718):
    preset = get_preset("ex5-figB")
    model = preset.model_factory()
    obs = make_observed_dataset(preset.data)
    pipe = make_pipeline(list(preset.summaries), obs)
    kernel = AbcKernel(preset.kernel_family, [tau, tau])
    proposal = ProposalSpec("gaussian", np.array(preset.proposal_scales))
    return run_mcmc(model, pipe, kernel, proposal, RunConfig(10_000, seed))


def test_criterion_07a_wide_tau_acceptance_rate():
    chain = _run_figB(6.4)
    _report(
        7,
        "two-parameter preset at tau=6.4 accepts more than 80% of proposals",
        chain.acceptance_rate > 0.8,
        f"(acceptance={chain.acceptance_rate:.3f})",
    )


def test_criterion_07b_tight_tau_excludes_origin():
    chain = _run_figB(1.6)
    _, eps = chain.post_burn_in()
    included = heat_grid_2d(eps[:, 0], eps[:, 1]).contains_origin_in_hmr()
    _report(
        7,
        "joint 95% error region excludes the origin at tau=1.6",
        not included,
    )


def test_criterion_07c_wide_tau_includes_origin():
    chain = _run_figB(6.4)
    _, eps = chain.post_burn_in()
    included = heat_grid_2d(eps[:, 0], eps[:, 1]).contains_origin_in_hmr()
    _report(
        7,
        "joint 95% error region includes the origin at tau=6.4",
        included,
    )


def test_criterion_08_degeneracy_laws():
    n = 50_000
    crit = 1.628 * math.sqrt((n + n) / (n * n))
    model = make_poisson_model()
    obs = Dataset([3.0])

    prior_draws = make_rng(123).exponential(1.0, size=n)

    # flat kernel: every simulation is accepted, theta-marginal is the prior
    pipe = make_pipeline(["mean"], obs)
    flat = AbcKernel("uniform-box", [math.inf])
    chain = run_rejection(model, pipe, flat, RunConfig(n, 9))
    ks_flat = distribution_distance(chain.thetas[:, 0], prior_draws, metric="ks")

    # constant summary: the error is always zero, acceptance never binds
    const_pipe = DiscrepancyPipeline([lambda x: 1.0], ("const",), obs)
    kernel = AbcKernel("discrete-geometric", [1.0])
    chain2 = run_rejection(model, const_pipe, kernel, RunConfig(n, 10))
    ks_const = distribution_distance(chain2.thetas[:, 0], prior_draws, metric="ks")

    _report(
        8,
        "flat-kernel and constant-summary samplers reduce to the prior",
        ks_flat < crit and ks_const < crit,
        f"(KS flat={ks_flat:.4f}, const={ks_const:.4f}, crit={crit:.4f})",
    )


def test_criterion_09_posterior_broadens_as_tau_shrinks():
    preset = get_preset("appendix")
    model = preset.model_factory()
    obs = make_observed_dataset(preset.data)
    pipe = make_pipeline(list(preset.summaries), obs)
    proposal = ProposalSpec("gaussian", np.array(preset.proposal_scales))
    variances = []
    for tau in (4.0, 2.0, 1.0, 0.5):
        kernel = AbcKernel(preset.kernel_family, [tau])
        chain = run_mcmc(model, pipe, kernel, proposal, RunConfig(20_000, 5))
        thetas, _ = chain.post_burn_in()
        variances.append(float(thetas[:, 0].var()))
    increasing = all(b > a for a, b in zip(variances, variances[1:]))
    _report(
        9,
        "location-posterior variance strictly increases as tau decreases",
        increasing,
        f"(variances={[round(v, 1) for v in variances]})",
    )


def test_criterion_10_prior_predictive_mean_error_at_one():
    analytic = poisson_posterior_error(1, math.inf).mean()
    model = make_poisson_model()
    pipe = make_pipeline(["mean"], Dataset([1.0]))
    draws = run_prior_predictive(model, pipe, 100_000, 33)
    mc = float(draws.mean())
    _report(
        10,
        "prior predictive mean error vanishes at x0=1",
        abs(analytic) < 1e-9 and abs(mc) < 0.02,
        f"(analytic={analytic:.2e}, monte carlo={mc:.4f})",
    )


def test_criterion_11_cli_determinism(tmp_path, capsys):
    cfg = {
        "sampler": "mcmc",
        "observed": [3.0],
        "model": {"name": "poisson"},
        "summaries": ["mean"],
        "kernel": {"family": "discrete-geometric", "tau": [1.0]},
        "run": {"iterations": 2000, "seed": 7, "chains": 2},
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    rc1 = main(["run", "--config", str(cfg_path), "--out", str(tmp_path / "a")])
    rc2 = main(["run", "--config", str(cfg_path), "--out", str(tmp_path / "b")])
    capsys.readouterr()
    identical = all(
        (tmp_path / "a" / f"chain_{i:03d}.csv").read_bytes()
        == (tmp_path / "b" / f"chain_{i:03d}.csv").read_bytes()
        for i in range(2)
    )
    _report(
        11,
        "repeated runs with identical configs are byte-identical",
        rc1 == 0 and rc2 == 0 and identical,
    )


def test_criterion_12_posterior_predictive_samplers():
    x0 = 3
    model = make_poisson_model()
    pipe = make_pipeline(["mean"], Dataset([float(x0)]))
    kernel = AbcKernel("discrete-geometric", [1.0])

    # enumeration/quadrature reference: posterior over theta, then the
    # posterior predictive pmf over the simulated count j
    ys = np.arange(0, 80)
    yw = 2.0 ** (-np.abs(ys - x0))

    def post_unnorm(t):
        return math.exp(-t) * float(stats.poisson.pmf(ys, t) @ yw)

    norm = integrate.quad(post_unnorm, 0, 40, limit=200)[0]
    js = np.arange(0, 40)
    app_ref = np.array(
        [
            integrate.quad(
                lambda t: post_unnorm(t) * stats.poisson.pmf(j, t), 0, 40, limit=200
            )[0]
            for j in js
        ]
    ) / norm
    app_ref /= app_ref.sum()
    wapp_ref = app_ref * 2.0 ** (-np.abs(js - x0))
    wapp_ref /= wapp_ref.sum()

    proposal = ProposalSpec("gaussian", np.array([0.5]))
    train = run_mcmc(model, pipe, kernel, proposal, RunConfig(50_000, 3))
    thetas, _ = train.post_burn_in()
    draws = run_app(thetas, model, pipe, 50_000, 4)
    j_sample = draws[:, 0] + x0
    tv_app = distribution_distance((js, app_ref), j_sample)

    weighted = run_wapp(draws, kernel)
    emp = np.zeros(js.size)
    ji = np.round(j_sample).astype(int)
    inside = (ji >= 0) & (ji < js.size)
    np.add.at(emp, ji[inside], weighted.weights[inside])
    emp /= weighted.weights.sum()
    tv_wapp = 0.5 * np.abs(emp - wapp_ref).sum()

    flat = run_wapp(draws, AbcKernel("discrete-geometric", [math.inf]))
    flat_equal = bool(np.all(flat.weights == flat.weights[0]))

    _report(
        12,
        "posterior predictive samplers match enumeration oracles",
        tv_app <= 0.05 and tv_wapp <= 0.05 and flat_equal,
        f"(TV app={tv_app:.4f}, wapp={tv_wapp:.4f}, flat weights constant={flat_equal})",
    )
