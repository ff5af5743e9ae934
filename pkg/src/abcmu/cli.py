"""Batch front door: run experiments, analyze chains, evaluate oracles,
reproduce the shipped figure datasets.

Exit codes are stable: 0 success, 2 configuration or input problem,
3 simulation budget exhausted, 4 claim check failed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources

import numpy as np

from . import chainio, diagnostics, models, oracles
from .chainio import atomic_write_text, canonical_json
from .core import AbcKernel, Dataset
from .errors import (
    AbcmuError,
    BudgetExhaustedError,
    ConfigurationError,
    InputError,
    InsufficientSampleError,
)
from .models import (
    ExponentialDataSource,
    M3Hyper,
    get_preset,
    make_gaussian_location_model,
    make_gaussian_two_param_model,
    make_observed_dataset,
    make_pipeline,
    make_poisson_grid_model,
    make_poisson_model,
)
from .rng import spawn_seeds
from .samplers import (
    ProposalSpec,
    RunConfig,
    default_proposal,
    run_app,
    run_mcmc,
    run_prior_predictive,
    run_rejection,
    run_wapp,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_CLAIM = 4


def _schema() -> dict:
    with resources.files("abcmu").joinpath("config_schema.json").open() as fh:
        return json.load(fh)


def load_config(path: str) -> dict:
    """Load and schema-validate an experiment config."""
    import jsonschema

    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config is not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(cfg, _schema())
    except jsonschema.ValidationError as exc:
        where = ".".join(str(p) for p in exc.absolute_path) or "(root)"
        raise ConfigurationError(f"config field {where}: {exc.message}") from exc
    return cfg


def _parse_tau(values) -> np.ndarray:
    out = []
    for v in values:
        if isinstance(v, str):
            if v.lower() in ("inf", "infinity"):
                out.append(math.inf)
                continue
            try:
                out.append(float(v))
            except ValueError as exc:
                raise ConfigurationError(
                    f"kernel.tau entry {v!r} is not a number"
                ) from exc
        else:
            out.append(float(v))
    return np.array(out)


def _build_model(spec: dict):
    name = spec["name"]
    if name == "poisson":
        return make_poisson_model()
    if name == "poisson-grid":
        if "grid" not in spec:
            raise ConfigurationError("model.grid is required for poisson-grid")
        return make_poisson_grid_model(spec["grid"])
    if name == "gaussian-location":
        return make_gaussian_location_model(
            spec.get("theta_star", 0.0),
            spec.get("h2", 1.0),
            spec.get("variance", 1.0),
            spec.get("n", 1),
        )
    if name == "gaussian-2p":
        hyper = M3Hyper(
            mu0=spec.get("mu0", 0.0),
            alpha0=spec.get("alpha0", 1.0),
            beta0=spec.get("beta0", 1.0),
            tau0=spec.get("tau0", 0.0),
            n0=spec.get("n0", 1.0),
        )
        return make_gaussian_two_param_model(
            spec.get("variant", "independent"), hyper, spec.get("n", 100)
        )
    raise ConfigurationError(f"unknown model name {name!r}")


def build_experiment(cfg: dict):
    """Materialize (model, observed, pipeline, kernel, proposal, run config)."""
    preset = get_preset(cfg["preset"]) if "preset" in cfg else None

    if "observed" in cfg:
        observed = Dataset(cfg["observed"])
    else:
        data_cfg = cfg.get("data", {})
        if preset is not None:
            base = preset.data
            source = ExponentialDataSource(
                data_cfg.get("rate", base.rate),
                data_cfg.get("n", base.n),
                data_cfg.get("seed", base.seed),
            )
        else:
            source = ExponentialDataSource(
                data_cfg.get("rate", 0.2),
                data_cfg.get("n", 100),
                data_cfg.get("seed", models.DEFAULT_DATA_SEED),
            )
        observed = make_observed_dataset(source)

    if preset is not None:
        model = preset.model_factory()
        summaries = cfg.get("summaries", list(preset.summaries))
        kernel_cfg = cfg.get(
            "kernel", {"family": preset.kernel_family, "tau": list(preset.tau)}
        )
    else:
        model = _build_model(cfg["model"])
        summaries = cfg["summaries"]
        kernel_cfg = cfg["kernel"]

    pipeline = make_pipeline(summaries, observed)
    tau = _parse_tau(kernel_cfg["tau"])
    if tau.size != pipeline.k:
        raise ConfigurationError(
            f"config field kernel.tau: length {tau.size} does not match "
            f"{pipeline.k} summaries"
        )
    kernel = AbcKernel(kernel_cfg["family"], tau)

    if "proposal" in cfg:
        proposal = ProposalSpec(
            cfg["proposal"]["family"], np.array(cfg["proposal"]["step_scales"])
        )
    elif preset is not None and preset.proposal_scales is not None:
        proposal = ProposalSpec("gaussian", np.array(preset.proposal_scales))
    else:
        proposal = default_proposal(model)
    if proposal.step_scales.size != model.theta_dim:
        raise ConfigurationError(
            "config field proposal.step_scales: length does not match theta dimension"
        )

    run_cfg = cfg["run"]
    config = RunConfig(
        iterations=run_cfg["iterations"],
        seed=run_cfg["seed"],
        burn_in_fraction=run_cfg.get("burn_in_fraction", 0.2),
        n_chains=run_cfg.get("chains", 1),
        thin=run_cfg.get("thin", 1),
    )
    return model, observed, pipeline, kernel, proposal, config


def _out_dir(args) -> str:
    if args.out:
        return args.out
    root = os.environ.get("ABCMU_DATA_DIR", ".")
    return os.path.join(root, "abcmu-out")


def _run_single_chain(cfg: dict, chain_seed: int):
    """Worker: rebuild the experiment from plain JSON and run one chain."""
    model, _, pipeline, kernel, proposal, config = build_experiment(cfg)
    chain_cfg = RunConfig(
        config.iterations, chain_seed, config.burn_in_fraction, 1, config.thin
    )
    if cfg["sampler"] == "mcmc":
        return run_mcmc(model, pipeline, kernel, proposal, chain_cfg)
    return run_rejection(model, pipeline, kernel, chain_cfg)


def _write_summary(path: str, payload: dict) -> None:
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _summary_array(x) -> list:
    return [float(v) for v in np.atleast_1d(x)]


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.setdefault("run", {})["seed"] = args.seed
    out = _out_dir(args)
    os.makedirs(out, exist_ok=True)
    sampler = cfg["sampler"]
    canon = json.loads(canonical_json(cfg))

    if sampler in ("rejection", "mcmc"):
        n_chains = cfg["run"].get("chains", 1)
        seeds = spawn_seeds(cfg["run"]["seed"], n_chains)
        if args.jobs > 1 and n_chains > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                chains = list(pool.map(_run_single_chain, [cfg] * n_chains, seeds))
        else:
            chains = [_run_single_chain(cfg, s) for s in seeds]

        paths = []
        for i, chain in enumerate(chains):
            p = os.path.join(out, f"chain_{i:03d}.csv")
            chainio.write_chain(p, chain, canon)
            paths.append(p)

        conv = diagnostics.convergence_and_ess(chains)
        pooled_eps = np.vstack([c.post_burn_in()[1] for c in chains])
        summary = {
            "sampler": sampler,
            "chains": paths,
            "acceptance_rates": list(conv.acceptance_rates),
            "ess": _summary_array(conv.ess),
            "coordinates": list(conv.names),
            "mean_error": _summary_array(pooled_eps.mean(axis=0)),
        }
        if conv.rhat is not None:
            summary["split_rhat"] = _summary_array(conv.rhat)
        _write_summary(os.path.join(out, "summary.json"), summary)
        print(f"wrote {len(paths)} chain file(s) and summary.json to {out}")
        return EXIT_OK

    # predictive samplers emit error draws rather than chains
    model, _, pipeline, kernel, _, config = build_experiment(cfg)
    n = config.iterations
    if sampler == "prior-predictive":
        draws = run_prior_predictive(model, pipeline, n, config.seed)
        weights = None
    else:
        train_seed, draw_seed = spawn_seeds(config.seed, 2)
        train_cfg = RunConfig(n, train_seed, config.burn_in_fraction)
        train = run_mcmc(model, pipeline, kernel, None, train_cfg)
        thetas, _ = train.post_burn_in()
        draws = run_app(thetas, model, pipeline, n, draw_seed)
        weights = run_wapp(draws, kernel).weights if sampler == "wapp" else None

    header = ["iteration"] + [f"eps_{n_}" for n_ in pipeline.names]
    if weights is not None:
        header.append("weight")
    lines = [f"# config: {canonical_json(cfg)}", ",".join(header)]
    for i in range(draws.shape[0]):
        row = [str(i)] + [format(v, ".17g") for v in draws[i]]
        if weights is not None:
            row.append(format(weights[i], ".17g"))
        lines.append(",".join(row))
    p = os.path.join(out, "error_draws.csv")
    atomic_write_text(p, "\n".join(lines) + "\n")
    _write_summary(
        os.path.join(out, "summary.json"),
        {
            "sampler": sampler,
            "draws": p,
            "mean_error": _summary_array(
                draws.mean(axis=0)
                if weights is None
                else (weights[:, None] * draws).sum(axis=0) / weights.sum()
            ),
        },
    )
    print(f"wrote error draws and summary.json to {out}")
    return EXIT_OK


def _density_csv(path: str, est: diagnostics.DensityEstimate1D) -> None:
    lines = ["grid,density"] + [
        f"{format(g, '.17g')},{format(v, '.17g')}"
        for g, v in zip(est.grid, est.values)
    ]
    atomic_write_text(path, "\n".join(lines) + "\n")


def _heat_csv(path: str, hg: diagnostics.HeatGrid2D) -> None:
    lines = ["# row index over x bins, column index over y bins"]
    lines.append("x_edges," + ",".join(format(v, ".17g") for v in hg.x_edges))
    lines.append("y_edges," + ",".join(format(v, ".17g") for v in hg.y_edges))
    for i in range(hg.mass.shape[0]):
        lines.append(
            f"mass_{i}," + ",".join(format(v, ".17g") for v in hg.mass[i])
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def _analyze_chains(chains) -> tuple[dict, diagnostics.ErrorDensityReport]:
    names = chains[0].summary_names
    if any(c.summary_names != names for c in chains):
        raise InputError("chain files have inconsistent error columns")
    pooled = np.vstack([c.post_burn_in()[1] for c in chains])
    if pooled.shape[0] < 2:
        raise InsufficientSampleError("chains contain too few post-burn-in states")
    report = diagnostics.error_density_report(pooled, names=names)
    mean, mcse = diagnostics.posterior_mean_error(chains[0]) if len(chains) == 1 else (
        report.mean_error,
        None,
    )
    payload = {
        "error_names": list(report.names),
        "mean_error": _summary_array(report.mean_error),
        "intervals_95": [list(map(float, row)) for row in report.intervals],
        "zero_in_marginal": [bool(b) for b in report.zero_in_marginal],
        "zero_in_joint": bool(report.zero_in_joint),
        "acceptance_rates": [c.acceptance_rate for c in chains],
    }
    if mcse is not None:
        payload["mean_error_mcse"] = _summary_array(mcse)
    return payload, report


def cmd_analyze(args) -> int:
    chains = []
    for path in args.chains:
        chain, _ = chainio.read_chain(path)
        chains.append(chain)
    payload, report = _analyze_chains(chains)
    out = _out_dir(args)
    os.makedirs(out, exist_ok=True)
    for name, est in zip(report.names, report.marginals):
        _density_csv(os.path.join(out, f"density_{name}.csv"), est)
    for (i, j), hg in report.heat_grids.items():
        _heat_csv(
            os.path.join(out, f"heat_{report.names[i]}_{report.names[j]}.csv"), hg
        )
    _write_summary(os.path.join(out, "report.json"), payload)
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------------------
# oracle subcommand

ORACLE_NAMES = (
    "shifted-poisson-xi",
    "gaussian-prior-pred",
    "gaussian-fitted",
    "bayes-factor",
    "poisson-posterior-pmf",
    "poisson-marglik",
    "poisson-mean-error-curve",
    "marglik-curve",
)

_CURVE_TAUS = (2.0 / 3.0, 2.0, math.inf)


def evaluate_oracle(name: str, params: dict) -> dict:
    """Evaluate a named closed-form quantity; returns inputs plus values."""
    echo = {k: v for k, v in params.items() if v is not None}
    if name == "shifted-poisson-xi":
        value = oracles.shifted_poisson_xi(
            params["theta"], params["x0"], params["eps"]
        )
        return {"oracle": name, "inputs": echo, "value": value}
    if name == "gaussian-prior-pred":
        law = oracles.gaussian_prior_predictive_error(
            params["theta_star"], params["h2"], params["x0"]
        )
        return {"oracle": name, "inputs": echo, "mean": law.mean, "variance": law.variance}
    if name == "gaussian-fitted":
        law = oracles.gaussian_fitted_posterior_error(
            params["theta_star"], params["h2"], params["x0"], params["tau"]
        )
        return {"oracle": name, "inputs": echo, "mean": law.mean, "variance": law.variance}
    if name == "bayes-factor":
        value = oracles.approx_bayes_factor(
            params["x0"], params["theta_star"], params["h2"], params["tau2"]
        )
        return {"oracle": name, "inputs": echo, "value": value}
    if name == "poisson-posterior-pmf":
        pmf = oracles.poisson_posterior_error(int(params["x0"]), params["tau"])
        return {
            "oracle": name,
            "inputs": echo,
            "support": [int(e) for e in pmf.support],
            "masses": [float(m) for m in pmf.masses],
            "mean_error": pmf.mean(),
        }
    if name == "poisson-marglik":
        value = oracles.poisson_marginal_likelihood(int(params["x0"]), params["tau"])
        return {"oracle": name, "inputs": echo, "value": value}
    if name in ("poisson-mean-error-curve", "marglik-curve"):
        x0_max = int(params.get("x0_max") or 20)
        taus = params.get("taus") or list(_CURVE_TAUS)
        curves = {}
        for tau in taus:
            key = "inf" if math.isinf(tau) else f"{tau:g}"
            if name == "poisson-mean-error-curve":
                curves[key] = [
                    oracles.poisson_posterior_error(x0, tau).mean()
                    for x0 in range(x0_max + 1)
                ]
            else:
                curves[key] = [
                    oracles.poisson_marginal_likelihood(x0, tau)
                    for x0 in range(x0_max + 1)
                ]
        return {
            "oracle": name,
            "inputs": echo,
            "x0": list(range(x0_max + 1)),
            "curves": curves,
        }
    raise ConfigurationError(
        f"unknown oracle {name!r}; choose from {ORACLE_NAMES}"
    )


def cmd_oracle(args) -> int:
    params = {
        "theta": args.theta,
        "theta_star": args.theta_star,
        "h2": args.h2,
        "tau": args.tau,
        "tau2": args.tau2,
        "x0": args.x0,
        "eps": args.eps,
        "x0_max": args.x0_max,
        "taus": [_parse_tau([t])[0] for t in args.taus] if args.taus else None,
    }
    try:
        payload = evaluate_oracle(args.name, params)
    except (KeyError, TypeError) as exc:
        raise ConfigurationError(
            f"oracle {args.name!r} is missing a required parameter: {exc}"
        ) from exc
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        atomic_write_text(os.path.join(args.out, f"oracle_{args.name}.json"), text + "\n")
    print(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# reproduce subcommand

FIGURES = ("fig1", "fig2", "fig3", "fig4-5", "fig6")


class ClaimFailure(AbcmuError):
    def __init__(self, message: str, hard: bool):
        super().__init__(message)
        self.hard = hard


def _mcmc_preset(preset_name: str, iterations: int, seed: int, n_chains: int = 1,
                 tau=None):
    cfg = {
        "preset": preset_name,
        "sampler": "mcmc",
        "run": {"iterations": iterations, "seed": seed, "chains": n_chains},
    }
    if tau is not None:
        preset = get_preset(preset_name)
        cfg["kernel"] = {
            "family": preset.kernel_family,
            "tau": ["inf" if math.isinf(t) else t for t in tau],
        }
    model, observed, pipeline, kernel, proposal, config = build_experiment(cfg)
    seeds = spawn_seeds(seed, n_chains)
    chains = []
    for s in seeds:
        cc = RunConfig(iterations, s, config.burn_in_fraction)
        chains.append(run_mcmc(model, pipeline, kernel, proposal, cc))
    return chains, cfg


def _reproduce_fig1(out: str, scale: float, seed: int) -> list[dict]:
    claims = []
    for preset_name in ("ex3-tight", "ex3-flat"):
        iters = max(int(10_000 * scale), 500)
        chains, cfg = _mcmc_preset(preset_name, iters, seed, n_chains=4)
        for i, c in enumerate(chains):
            chainio.write_chain(
                os.path.join(out, f"{preset_name}_chain_{i}.csv"),
                c,
                json.loads(canonical_json(cfg)),
            )
        payload, report = _analyze_chains(chains)
        for name, est in zip(report.names, report.marginals):
            _density_csv(os.path.join(out, f"{preset_name}_density_{name}.csv"), est)
        lo, hi = report.intervals[0]
        excluded = not (lo <= 0.0 <= hi)
        margin = min(abs(lo), abs(hi))
        claims.append(
            {
                "claim": f"{preset_name}: 95% interval of eps_mean excludes 0",
                "passed": bool(excluded),
                "interval": [float(lo), float(hi)],
                "hard_violation": bool(not excluded and 0.0 > hi + 3 * (hi - lo) / 2),
            }
        )
        _ = margin
    return claims


def _reproduce_fig2(out: str, scale: float, seed: int) -> list[dict]:
    claims = []
    for preset_name in ("ex3-tight", "ex3-flat"):
        iters = max(int(10_000 * scale), 500)
        chains, _ = _mcmc_preset(preset_name, iters, seed, n_chains=2)
        pooled = np.vstack([c.post_burn_in()[1] for c in chains])
        hg = diagnostics.heat_grid_2d(pooled[:, 0], pooled[:, 1])
        _heat_csv(os.path.join(out, f"{preset_name}_heat.csv"), hg)
        included = hg.contains_origin_in_hmr()
        claims.append(
            {
                "claim": f"{preset_name}: joint 95% region excludes the origin",
                "passed": bool(not included),
                "hard_violation": False,
            }
        )
    return claims


def _reproduce_fig3(out: str, scale: float, seed: int) -> list[dict]:
    claims = []
    iters = max(int(10_000 * scale), 500)
    runs = [
        ("ex5-figA", (1.6, 1.6), "excludes"),
        ("ex5-figB", (1.6, 1.6), "excludes"),
        ("ex5-figB", (6.4, 6.4), "includes"),
    ]
    for preset_name, tau, expect in runs:
        chains, _ = _mcmc_preset(preset_name, iters, seed, n_chains=1, tau=tau)
        chain = chains[0]
        _, eps = chain.post_burn_in()
        hg = diagnostics.heat_grid_2d(eps[:, 0], eps[:, 1])
        tag = f"{preset_name}_tau{tau[0]:g}"
        _heat_csv(os.path.join(out, f"{tag}_heat.csv"), hg)
        included = hg.contains_origin_in_hmr()
        ok = included if expect == "includes" else not included
        claims.append(
            {
                "claim": f"{tag}: joint 95% region {expect} the origin",
                "passed": bool(ok),
                "hard_violation": False,
            }
        )
        if tau[0] == 6.4:
            claims.append(
                {
                    "claim": f"{tag}: acceptance rate > 0.8",
                    "passed": bool(chain.acceptance_rate > 0.8),
                    "acceptance_rate": chain.acceptance_rate,
                    "hard_violation": bool(chain.acceptance_rate < 0.8 / 3),
                }
            )
    return claims


def _reproduce_fig45(out: str, scale: float, seed: int) -> list[dict]:
    del scale, seed  # closed forms, no simulation
    x0s = list(range(21))
    claims = []
    lines_me = ["x0," + ",".join("tau_inf" if math.isinf(t) else f"tau_{t:g}" for t in _CURVE_TAUS)]
    lines_ml = list(lines_me)
    me = {t: [oracles.poisson_posterior_error(x, t).mean() for x in x0s] for t in _CURVE_TAUS}
    ml = {t: [oracles.poisson_marginal_likelihood(x, t) for x in x0s] for t in _CURVE_TAUS}
    for i, x in enumerate(x0s):
        lines_me.append(f"{x}," + ",".join(format(me[t][i], ".17g") for t in _CURVE_TAUS))
        lines_ml.append(f"{x}," + ",".join(format(ml[t][i], ".17g") for t in _CURVE_TAUS))
    atomic_write_text(os.path.join(out, "posterior_mean_error.csv"), "\n".join(lines_me) + "\n")
    atomic_write_text(os.path.join(out, "marginal_likelihood.csv"), "\n".join(lines_ml) + "\n")
    for t in _CURVE_TAUS:
        if math.isinf(t):
            continue  # flat factor: the curve is constant at 1
        mono = bool(np.all(np.diff(ml[t]) < 0))
        key = f"{t:g}"
        claims.append(
            {
                "claim": f"marginal likelihood decreases monotonically (tau={key})",
                "passed": mono,
                "hard_violation": not mono,
            }
        )
    prior_me = me[math.inf][1]
    claims.append(
        {
            "claim": "prior predictive mean error is zero at x0=1 (tau=inf)",
            "passed": bool(abs(prior_me) < 1e-9),
            "value": prior_me,
            "hard_violation": bool(abs(prior_me) >= 3e-9),
        }
    )
    return claims


def _reproduce_fig6(out: str, scale: float, seed: int) -> list[dict]:
    iters = max(int(20_000 * scale), 1000)
    taus = (4.0, 2.0, 1.0, 0.5)
    variances = []
    for tau in taus:
        chains, _ = _mcmc_preset("appendix", iters, seed, n_chains=1, tau=(tau,))
        thetas, _ = chains[0].post_burn_in()
        mu = thetas[:, 0]
        est = diagnostics.estimate_density_1d(mu)
        _density_csv(os.path.join(out, f"mu_density_tau{tau:g}.csv"), est)
        variances.append(float(np.var(mu)))
    increasing = bool(np.all(np.diff(variances) > 0))
    # hard only if some later variance falls 3x below an earlier one
    hard = bool(any(variances[i + 1] * 3 < variances[i] for i in range(len(variances) - 1)))
    return [
        {
            "claim": "variance of the mu posterior strictly increases as tau decreases "
            f"(tau={list(taus)})",
            "passed": increasing,
            "variances": variances,
            "hard_violation": hard,
        }
    ]


def cmd_reproduce(args) -> int:
    out = os.path.join(_out_dir(args), args.figure)
    os.makedirs(out, exist_ok=True)
    seed = args.seed if args.seed is not None else 2718
    runner = {
        "fig1": _reproduce_fig1,
        "fig2": _reproduce_fig2,
        "fig3": _reproduce_fig3,
        "fig4-5": _reproduce_fig45,
        "fig6": _reproduce_fig6,
    }[args.figure]
    claims = runner(out, args.scale, seed)
    manifest = {"figure": args.figure, "scale": args.scale, "seed": seed, "claims": claims}
    _write_summary(os.path.join(out, "manifest.json"), manifest)
    failed = [c for c in claims if not c["passed"]]
    print(json.dumps(manifest, indent=2, sort_keys=True))
    if failed:
        kinds = "hard violation" if any(c.get("hard_violation") for c in failed) else (
            "likely Monte Carlo noise; rerun with a larger --scale"
        )
        print(f"claim check failed ({kinds}): {[c['claim'] for c in failed]}", file=sys.stderr)
        return EXIT_CLAIM
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abcmu",
        description="Likelihood-free inference and model criticism toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from a JSON config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--jobs", type=int, default=1)
    p_run.add_argument("--seed", type=int, default=None, help="override run.seed")
    p_run.set_defaults(func=cmd_run)

    p_an = sub.add_parser("analyze", help="build an error-density report from chains")
    p_an.add_argument("chains", nargs="+")
    p_an.add_argument("--out", default=None)
    p_an.set_defaults(func=cmd_analyze)

    p_or = sub.add_parser("oracle", help="evaluate a closed-form reference quantity")
    p_or.add_argument("name")
    p_or.add_argument("--out", default=None)
    p_or.add_argument("--x0", type=float, default=None)
    p_or.add_argument("--eps", type=int, default=None)
    p_or.add_argument("--theta", type=float, default=None)
    p_or.add_argument("--theta-star", type=float, default=None)
    p_or.add_argument("--h2", type=float, default=None)
    p_or.add_argument("--tau", type=float, default=None)
    p_or.add_argument("--tau2", type=float, default=None)
    p_or.add_argument("--x0-max", type=int, default=None)
    p_or.add_argument("--taus", nargs="*", default=None)
    p_or.set_defaults(func=cmd_oracle)

    p_re = sub.add_parser("reproduce", help="regenerate a figure's underlying data")
    p_re.add_argument("figure", choices=FIGURES)
    p_re.add_argument("--out", default=None)
    p_re.add_argument("--scale", type=float, default=1.0)
    p_re.add_argument("--seed", type=int, default=None)
    p_re.set_defaults(func=cmd_reproduce)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExhaustedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ConfigurationError, InputError, InsufficientSampleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
