"""Domain types shared by samplers, oracles and diagnostics.

A generative model couples a simulator with a prior; a discrepancy
pipeline turns datasets into signed per-summary errors relative to the
observed data; a kernel assigns each error vector a zero-centered,
dimension-wise weight.  Everything here is immutable after construction
and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import accel
from .errors import ConfigurationError, InputError

KERNEL_FAMILIES = ("uniform-box", "gaussian", "laplace", "discrete-geometric")

_WEIGHT_FN = {
    "uniform-box": "weight_uniform_box",
    "gaussian": "weight_gaussian",
    "laplace": "weight_laplace",
    "discrete-geometric": "weight_geometric",
}


def _as_vector(values, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise InputError(f"{what} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{what} contains non-finite values")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ParameterVector:
    """Ordered model parameters with one label per coordinate."""

    values: np.ndarray
    names: tuple[str, ...]

    def __init__(self, values, names: Sequence[str] | None = None):
        arr = _as_vector(values, "parameter vector")
        if names is None:
            names = tuple(f"theta{i}" for i in range(arr.size))
        names = tuple(names)
        if len(names) != arr.size:
            raise InputError("parameter names do not match dimension")
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "names", names)

    @property
    def dim(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class Dataset:
    """An ordered vector of real observations."""

    observations: np.ndarray

    def __init__(self, observations):
        arr = _as_vector(observations, "dataset")
        if arr.size < 1:
            raise InputError("dataset must contain at least one observation")
        object.__setattr__(self, "observations", arr)

    @property
    def size(self) -> int:
        return self.observations.size


@dataclass(frozen=True)
class SummaryVector:
    """Values of the K summary statistics of one dataset."""

    values: np.ndarray
    names: tuple[str, ...]

    def __init__(self, values, names: Sequence[str]):
        arr = _as_vector(values, "summary vector")
        names = tuple(names)
        if len(names) != arr.size:
            raise InputError("summary names do not match length")
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "names", names)


@dataclass(frozen=True)
class ErrorVector:
    """Signed per-summary discrepancies, one entry per summary."""

    values: np.ndarray

    def __init__(self, values):
        arr = _as_vector(values, "error vector")
        object.__setattr__(self, "values", arr)


@dataclass(frozen=True)
class DiscrepancyPipeline:
    """K summary statistics plus signed differences against the observed data.

    The reference summaries are computed once from the observed dataset at
    construction; errors are always simulated-minus-observed, so an error of
    zero means the summaries match exactly.
    """

    summaries: tuple[Callable[[np.ndarray], float], ...]
    names: tuple[str, ...]
    reference: SummaryVector

    def __init__(self, summaries, names, observed: Dataset):
        summaries = tuple(summaries)
        names = tuple(names)
        if len(summaries) < 1:
            raise ConfigurationError("pipeline needs at least one summary")
        if len(names) != len(summaries):
            raise ConfigurationError("summary names do not match functions")
        ref = np.array([s(observed.observations) for s in summaries], dtype=float)
        object.__setattr__(self, "summaries", summaries)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "reference", SummaryVector(ref, names))

    @property
    def k(self) -> int:
        return len(self.summaries)

    def summarize(self, data: Dataset) -> np.ndarray:
        """Raw summary values of ``data`` (no wrapping, used in hot loops)."""
        obs = data.observations
        return np.array([s(obs) for s in self.summaries], dtype=float)

    def errors_of(self, data: Dataset) -> np.ndarray:
        return self.summarize(data) - self.reference.values


@dataclass(frozen=True)
class AbcKernel:
    """Factorized zero-centered weighting density over error vectors.

    Evaluation is unnormalized where convenient; samplers only ever use
    ratios, so the dimension-wise constant never matters.  A scale of
    ``inf`` in any dimension makes that factor flat (constant 1).
    """

    family: str
    tau: np.ndarray

    def __init__(self, family: str, tau):
        if family not in KERNEL_FAMILIES:
            raise ConfigurationError(
                f"unknown kernel family {family!r}; choose from {KERNEL_FAMILIES}"
            )
        arr = np.asarray(tau, dtype=float)
        if arr.ndim == 0:
            arr = arr.reshape(1)
        if arr.ndim != 1 or arr.size < 1:
            raise ConfigurationError("tau must be a non-empty vector")
        if np.any(np.isnan(arr)) or np.any(arr <= 0):
            raise ConfigurationError("every kernel scale must be positive")
        arr.flags.writeable = False
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "tau", arr)
        object.__setattr__(self, "_weight", getattr(accel, _WEIGHT_FN[family]))

    @property
    def k(self) -> int:
        return self.tau.size

    def weight(self, eps: np.ndarray) -> float:
        """Joint kernel weight of a raw error array."""
        if eps.size != self.tau.size:
            raise InputError(
                f"error vector has length {eps.size}, kernel expects {self.tau.size}"
            )
        return float(self._weight(eps, self.tau))

    def factor(self, k: int, e: float) -> float:
        """Weight of the single dimension ``k`` at error ``e``."""
        one = np.array([e], dtype=float)
        return float(self._weight(one, self.tau[k : k + 1]))


@dataclass(frozen=True)
class PriorSpec:
    """Sampler, unnormalized density and support test for a prior on theta."""

    sample: Callable[[np.random.Generator], np.ndarray]
    density: Callable[[np.ndarray], float]
    in_support: Callable[[np.ndarray], bool]
    scale: np.ndarray = field(default=None)  # proposal scale measure per coordinate

    def __post_init__(self):
        if self.scale is not None:
            arr = np.asarray(self.scale, dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, "scale", arr)


@dataclass(frozen=True)
class GenerativeModel:
    """A simulator plus a prior: the object under criticism.

    ``simulate`` must be a pure function of ``(theta, seed)``: identical
    inputs yield identical datasets.
    """

    simulate: Callable[[np.ndarray, int], Dataset]
    prior: PriorSpec
    theta_dim: int
    label: str
    theta_names: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.theta_names:
            object.__setattr__(
                self, "theta_names", tuple(f"theta{i}" for i in range(self.theta_dim))
            )


# ---------------------------------------------------------------------------
# operations


def compute_summaries(pipeline: DiscrepancyPipeline, data: Dataset) -> SummaryVector:
    """Evaluate the pipeline's summary statistics on ``data``."""
    return SummaryVector(pipeline.summarize(data), pipeline.names)


def compute_errors(
    pipeline: DiscrepancyPipeline, simulated: SummaryVector
) -> ErrorVector:
    """Signed discrepancies of simulated summaries against the reference."""
    if simulated.values.size != pipeline.k:
        raise InputError(
            f"summary vector has length {simulated.values.size}, "
            f"pipeline has K={pipeline.k}"
        )
    return ErrorVector(simulated.values - pipeline.reference.values)


def kernel_weight(kernel: AbcKernel, eps: ErrorVector) -> float:
    """Joint kernel weight of an error vector."""
    return kernel.weight(eps.values)


@dataclass(frozen=True)
class KernelValidationReport:
    """Outcome of the kernel axiom checks; findings never raise."""

    passed: bool
    violations: tuple[str, ...]


def validate_kernel(
    kernel,
    grid: np.ndarray | None = None,
    n_probe: int = 101,
    span: float = 5.0,
    probe_seed: int = 0,
) -> KernelValidationReport:
    """Check symmetry, mode at zero, monotonicity and factorization.

    Axioms are probed on a grid of ``n_probe`` points spanning ``span``
    scale units per dimension (a convention; flat dimensions use a unit
    scale), plus randomized joint probes for the factorization check.
    ``kernel`` only needs ``tau``, ``factor`` and ``weight`` attributes,
    so deliberately broken test kernels can be validated too.
    """
    tau = np.asarray(kernel.tau, dtype=float)
    violations: list[str] = []
    rtol = 1e-9

    for k in range(tau.size):
        scale = tau[k] if np.isfinite(tau[k]) else 1.0
        pts = grid if grid is not None else np.linspace(-span * scale, span * scale, n_probe)
        vals = np.array([kernel.factor(k, float(e)) for e in pts])
        neg = np.array([kernel.factor(k, float(-e)) for e in pts])
        if not np.allclose(vals, neg, rtol=rtol, atol=1e-300):
            violations.append(f"dimension {k}: not symmetric about zero")
        at_zero = kernel.factor(k, 0.0)
        if np.any(vals > at_zero * (1 + rtol)):
            violations.append(f"dimension {k}: mode is not at zero")
        pos = pts[pts >= 0]
        pos_vals = np.array([kernel.factor(k, float(e)) for e in np.sort(pos)])
        if np.any(np.diff(pos_vals) > at_zero * rtol):
            violations.append(f"dimension {k}: not monotone non-increasing in |e|")

    rng = np.random.Generator(np.random.Philox(key=probe_seed))
    scales = np.where(np.isfinite(tau), tau, 1.0)
    for _ in range(32):
        eps = rng.normal(0.0, scales)
        joint = kernel.weight(eps)
        prod = 1.0
        for k in range(tau.size):
            prod *= kernel.factor(k, float(eps[k]))
        if not np.isclose(joint, prod, rtol=1e-12, atol=1e-300):
            violations.append("joint weight does not factorize over dimensions")
            break

    return KernelValidationReport(passed=not violations, violations=tuple(violations))
