"""Chain and draw post-processing: densities, intervals, convergence, distances.

Central 95% intervals are the [2.5%, 97.5%] empirical quantiles.  The
credibility intervals reported here deliberately carry no formal
frequency guarantee: whether zero falls inside is an operational
mismatch criterion, not a calibrated test.
"""

from __future__ import annotations

import math

from dataclasses import dataclass

import numpy as np

from . import accel
from .errors import InputError, InsufficientSampleError
from .samplers import Chain


@dataclass(frozen=True)
class DensityEstimate1D:
    """A normalized density (or lattice pmf) estimate on a grid."""

    grid: np.ndarray
    values: np.ndarray
    bandwidth: float
    method: str  # histogram | kde | pmf | point-mass

    @property
    def is_point_mass(self) -> bool:
        return self.method == "point-mass"


@dataclass(frozen=True)
class HeatGrid2D:
    """Normalized 2-D mass on a rectangular grid."""

    x_edges: np.ndarray
    y_edges: np.ndarray
    mass: np.ndarray  # (nx, ny), sums to 1

    def contains_origin_in_hmr(self, level: float = 0.95) -> bool:
        """Is the origin's cell inside the highest-mass region of given level?"""
        ix = np.searchsorted(self.x_edges, 0.0, side="right") - 1
        iy = np.searchsorted(self.y_edges, 0.0, side="right") - 1
        if not (0 <= ix < self.mass.shape[0] and 0 <= iy < self.mass.shape[1]):
            return False
        flat = self.mass.ravel()
        order = np.argsort(flat)[::-1]
        cum = np.cumsum(flat[order])
        cutoff_rank = int(np.searchsorted(cum, level)) + 1
        in_region = np.zeros(flat.size, dtype=bool)
        in_region[order[:cutoff_rank]] = True
        return bool(in_region.reshape(self.mass.shape)[ix, iy])


@dataclass(frozen=True)
class ErrorDensityReport:
    """Marginal and pairwise views of a posterior-error sample."""

    names: tuple[str, ...]
    marginals: tuple[DensityEstimate1D, ...]
    heat_grids: dict  # (i, j) -> HeatGrid2D
    mean_error: np.ndarray
    intervals: np.ndarray  # (K, 2) central 95% bounds
    zero_in_marginal: np.ndarray  # (K,) bool
    zero_in_joint: bool


def _effective_n(weights: np.ndarray) -> float:
    return float(weights.sum() ** 2 / np.sum(weights**2))


def weighted_quantile(values: np.ndarray, q, weights: np.ndarray | None = None):
    """Quantiles of a (possibly weighted) sample via the weighted ECDF."""
    values = np.asarray(values, dtype=float)
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if weights is None:
        return np.quantile(values, q)
    order = np.argsort(values)
    v = values[order]
    w = np.asarray(weights, dtype=float)[order]
    cw = np.cumsum(w) - 0.5 * w
    cw /= w.sum()
    return np.interp(q, cw, v)


def estimate_density_1d(
    draws,
    method: str = "kde",
    grid: np.ndarray | None = None,
    n_grid: int = 256,
    weights: np.ndarray | None = None,
    bandwidth: float | None = None,
) -> DensityEstimate1D:
    """Estimate a normalized 1-D density from (weighted) draws.

    KDE bandwidth follows the normal-reference rule unless overridden.
    A zero-variance sample yields a point-mass report rather than a crash.
    """
    x = np.asarray(draws, dtype=float).ravel()
    if x.size < 2:
        raise InputError("need at least two draws")
    w = np.ones(x.size) if weights is None else np.asarray(weights, dtype=float)
    if w.size != x.size:
        raise InputError("weights must match draws")
    if np.any(w < 0) or w.sum() <= 0:
        raise InputError("weights must be nonnegative with positive total")
    w = w / w.sum()

    mu = float(np.dot(w, x))
    var = float(np.dot(w, (x - mu) ** 2))
    if np.ptp(x) == 0.0 or var == 0.0:
        mu = float(x[0]) if np.ptp(x) == 0.0 else mu
        return DensityEstimate1D(
            np.array([mu]), np.array([1.0]), 0.0, "point-mass"
        )

    if method == "histogram":
        edges = grid if grid is not None else np.histogram_bin_edges(x, bins=n_grid // 4)
        dens, edges = np.histogram(x, bins=edges, weights=w, density=True)
        centers = 0.5 * (edges[:-1] + edges[1:])
        # renormalize the trapezoid integral exactly
        integral = np.trapezoid(dens, centers)
        return DensityEstimate1D(centers, dens / integral, float(np.diff(edges).mean()), "histogram")

    if method != "kde":
        raise InputError(f"unknown density method {method!r}")

    n_eff = _effective_n(w)
    bw = bandwidth if bandwidth is not None else 1.06 * np.sqrt(var) * n_eff ** (-0.2)
    if grid is None:
        grid = np.linspace(x.min() - 3 * bw, x.max() + 3 * bw, n_grid)
    z = (grid[:, None] - x[None, :]) / bw
    dens = np.exp(-0.5 * z * z) @ w / (bw * np.sqrt(2 * np.pi))
    integral = np.trapezoid(dens, grid)
    return DensityEstimate1D(grid, dens / integral, float(bw), "kde")


def lattice_pmf(draws, weights: np.ndarray | None = None) -> DensityEstimate1D:
    """Exact pmf of integer-valued draws (discrete-error chains skip KDE)."""
    x = np.asarray(draws, dtype=float).ravel()
    if not np.allclose(x, np.round(x)):
        raise InputError("draws are not lattice-valued")
    xi = np.round(x).astype(int)
    w = np.ones(x.size) if weights is None else np.asarray(weights, dtype=float)
    support = np.arange(xi.min(), xi.max() + 1)
    masses = np.zeros(support.size)
    np.add.at(masses, xi - xi.min(), w)
    masses /= masses.sum()
    return DensityEstimate1D(support.astype(float), masses, 0.0, "pmf")


def heat_grid_2d(
    x,
    y,
    weights: np.ndarray | None = None,
    bins: int = 32,
    coverage: float = 0.99,
) -> HeatGrid2D:
    """Normalized 2-D histogram over the central ``coverage`` range per axis."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if weights is not None:
        weights = np.asarray(weights, dtype=float)
        if np.any(weights < 0) or weights.sum() <= 0:
            raise InputError("weights must be nonnegative with positive total")
    lo = (1.0 - coverage) / 2.0
    xr = weighted_quantile(x, [lo, 1 - lo], weights)
    yr = weighted_quantile(y, [lo, 1 - lo], weights)
    if xr[0] == xr[1]:
        xr = xr + [-0.5, 0.5]
    if yr[0] == yr[1]:
        yr = yr + [-0.5, 0.5]
    mass, xe, ye = np.histogram2d(x, y, bins=bins, range=[xr, yr], weights=weights)
    total = mass.sum()
    if total <= 0:
        raise InputError("no mass inside the heat grid range")
    return HeatGrid2D(xe, ye, mass / total)


def error_density_report(
    eps_draws,
    weights: np.ndarray | None = None,
    names=None,
    bins: int = 32,
) -> ErrorDensityReport:
    """Full report: marginals, pairwise heat grids, means, intervals, flags."""
    eps = np.atleast_2d(np.asarray(eps_draws, dtype=float))
    n, k = eps.shape
    if n < 2:
        raise InsufficientSampleError("need at least two error draws")
    names = tuple(names) if names is not None else tuple(f"eps{i}" for i in range(k))
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)

    marginals = []
    intervals = np.empty((k, 2))
    zero_in = np.empty(k, dtype=bool)
    for j in range(k):
        col = eps[:, j]
        if np.allclose(col, np.round(col)) and np.ptp(col) > 0:
            marginals.append(lattice_pmf(col, w))
        else:
            marginals.append(estimate_density_1d(col, weights=w))
        intervals[j] = weighted_quantile(col, [0.025, 0.975], w)
        zero_in[j] = intervals[j, 0] <= 0.0 <= intervals[j, 1]

    heat = {}
    pair_flags = []
    for i in range(k):
        for j in range(i + 1, k):
            hg = heat_grid_2d(eps[:, i], eps[:, j], w, bins=bins)
            heat[(i, j)] = hg
            pair_flags.append(hg.contains_origin_in_hmr())
    joint = all(pair_flags) if pair_flags else bool(zero_in.all())

    mean_error = (w[:, None] * eps).sum(axis=0) / w.sum()
    return ErrorDensityReport(
        names, tuple(marginals), heat, mean_error, intervals, zero_in, joint
    )


def posterior_mean_error(chain: Chain) -> tuple[np.ndarray, np.ndarray]:
    """Per-dimension posterior mean error with batch-means standard errors."""
    _, eps = chain.post_burn_in()
    n = eps.shape[0]
    if n < 100:
        raise InsufficientSampleError(
            f"only {n} post-burn-in states; need at least 100"
        )
    mean = eps.mean(axis=0)
    n_batches = int(np.sqrt(n))
    usable = n_batches * (n // n_batches)
    batches = eps[:usable].reshape(n_batches, -1, eps.shape[1]).mean(axis=1)
    mcse = batches.std(axis=0, ddof=1) / np.sqrt(n_batches)
    return mean, mcse


def zero_inclusion(report: ErrorDensityReport) -> tuple[np.ndarray, bool]:
    """Marginal and joint zero-inclusion flags of a report."""
    return report.zero_in_marginal.copy(), report.zero_in_joint


@dataclass(frozen=True)
class ConvergenceSummary:
    names: tuple[str, ...]
    rhat: np.ndarray | None  # (n_coords,), None for a single chain
    ess: np.ndarray  # (n_coords,)
    ess_clipped: np.ndarray  # (n_coords,) bool
    acceptance_rates: tuple[float, ...]


def _chain_matrix(chain: Chain) -> np.ndarray:
    thetas, eps = chain.post_burn_in()
    return np.hstack([thetas, eps])


def _split_rhat(columns: list[np.ndarray]) -> float:
    halves = []
    for c in columns:
        h = len(c) // 2
        halves.extend([c[:h], c[h : 2 * h]])
    m = len(halves)
    n = min(len(h) for h in halves)
    halves = np.array([h[:n] for h in halves])
    chain_means = halves.mean(axis=1)
    w = halves.var(axis=1, ddof=1).mean()
    b = n * chain_means.var(ddof=1)
    if w <= 0:
        return np.inf if b > 0 else 1.0
    var_plus = (n - 1) / n * w + b / n
    return float(np.sqrt(var_plus / w))


def _ess_single(x: np.ndarray) -> float:
    n = x.size
    if np.ptp(x) == 0:
        return float(n)
    max_lag = min(n - 1, 1000)
    acov = accel.autocovariance(np.ascontiguousarray(x), max_lag)
    rho = acov / acov[0]
    # Geyer initial positive sequence: sum consecutive pairs while positive
    s = 0.0
    t = 1
    while t + 1 <= max_lag:
        pair = rho[t] + rho[t + 1]
        if pair <= 0:
            break
        s += pair
        t += 2
    return float(n / (1.0 + 2.0 * s))


def convergence_and_ess(chains: list[Chain]) -> ConvergenceSummary:
    """Split R-hat (multi-chain), ESS and acceptance rates per coordinate.

    Coordinates are the theta components followed by the error components.
    ESS estimates above the sample size are clipped and flagged.
    """
    if not chains:
        raise InputError("need at least one chain")
    mats = [_chain_matrix(c) for c in chains]
    n_coords = mats[0].shape[1]
    if any(m.shape[1] != n_coords for m in mats):
        raise InputError("chains have inconsistent coordinate counts")

    names = tuple(
        [f"theta{i}" for i in range(chains[0].thetas.shape[1])]
        + list(chains[0].summary_names)
    )

    rhat = None
    if len(chains) >= 2:
        rhat = np.array(
            [_split_rhat([m[:, j] for m in mats]) for j in range(n_coords)]
        )

    ess_raw = np.array(
        [sum(_ess_single(m[:, j]) for m in mats) for j in range(n_coords)]
    )
    total = sum(m.shape[0] for m in mats)
    clipped = ess_raw > total
    ess = np.minimum(ess_raw, total)

    return ConvergenceSummary(
        names, rhat, ess, clipped, tuple(c.acceptance_rate for c in chains)
    )


def _pmf_like(obj) -> tuple[np.ndarray, np.ndarray] | None:
    if hasattr(obj, "support") and hasattr(obj, "masses"):
        return np.asarray(obj.support), np.asarray(obj.masses, dtype=float)
    if isinstance(obj, tuple) and len(obj) == 2:
        return np.asarray(obj[0]), np.asarray(obj[1], dtype=float)
    return None


def _align_pmfs(a, b):
    (sa, ma), (sb, mb) = a, b
    support = np.union1d(sa, sb)
    pa = np.zeros(support.size)
    pb = np.zeros(support.size)
    pa[np.searchsorted(support, sa)] = ma
    pb[np.searchsorted(support, sb)] = mb
    return pa / pa.sum(), pb / pb.sum()


def _sample_to_pmf(sample, support):
    x = np.round(np.asarray(sample, dtype=float)).astype(int)
    masses = np.zeros(support.size)
    inside = np.isin(x, support)
    idx = np.searchsorted(support, x[inside])
    np.add.at(masses, idx, 1.0)
    # mass outside the reference support counts fully against TV
    return masses / x.size


def distribution_distance(a, b, metric: str = "tv_on_grid", bins: int = 50) -> float:
    """Distance between two samples and/or pmfs.

    ``tv_on_grid``: half the L1 gap of the two distributions binned on a
    shared grid (or aligned lattice for pmfs).  ``ks``: the two-sample
    sup-CDF gap (samples only).
    """
    pa, pb = _pmf_like(a), _pmf_like(b)
    la = a if hasattr(a, "cdf") else None
    lb = b if hasattr(b, "cdf") else None
    if metric == "tv_on_grid" and (la is not None or lb is not None):
        if la is not None and lb is not None:
            raise InputError("at most one continuous reference law is supported")
        law = la if la is not None else lb
        sample = np.asarray(b if la is not None else a, dtype=float).ravel()
        lo = min(sample.min(), law.mean - 6.0 * math.sqrt(law.variance))
        hi = max(sample.max(), law.mean + 6.0 * math.sqrt(law.variance))
        edges = np.linspace(lo, hi, bins + 1)
        hx, _ = np.histogram(sample, bins=edges)
        ref = np.diff(law.cdf(edges))
        tail = 1.0 - ref.sum()  # law mass beyond the binning range
        return float(0.5 * (np.abs(hx / sample.size - ref).sum() + tail))
    if metric == "tv_on_grid":
        if pa is not None and pb is not None:
            qa, qb = _align_pmfs(pa, pb)
            return float(0.5 * np.abs(qa - qb).sum())
        if pa is not None or pb is not None:
            pmf = pa if pa is not None else pb
            sample = b if pa is not None else a
            support = np.asarray(pmf[0])
            emp = _sample_to_pmf(sample, support)
            ref = pmf[1] / pmf[1].sum()
            missing = 1.0 - emp.sum()  # sample mass off the reference lattice
            return float(0.5 * (np.abs(emp - ref).sum() + missing))
        x = np.asarray(a, dtype=float).ravel()
        y = np.asarray(b, dtype=float).ravel()
        lo = min(x.min(), y.min())
        hi = max(x.max(), y.max())
        if lo == hi:
            return 0.0
        edges = np.linspace(lo, hi, bins + 1)
        hx, _ = np.histogram(x, bins=edges)
        hy, _ = np.histogram(y, bins=edges)
        return float(0.5 * np.abs(hx / x.size - hy / y.size).sum())

    if metric == "ks":
        if pa is not None or pb is not None:
            raise InputError("ks distance is defined for samples only")
        x = np.sort(np.asarray(a, dtype=float).ravel())
        y = np.sort(np.asarray(b, dtype=float).ravel())
        pooled = np.concatenate([x, y])
        cdf_x = np.searchsorted(x, pooled, side="right") / x.size
        cdf_y = np.searchsorted(y, pooled, side="right") / y.size
        return float(np.abs(cdf_x - cdf_y).max())

    raise InputError(f"unknown metric {metric!r}")
