"""Hot numeric primitives with a numba fast path.

Summary statistics, kernel weights and autocovariance are evaluated once
per sampler iteration, so they dominate runtime for the builtin models.
Each primitive exists twice: a loop-style version compiled with
``numba.njit`` and a vectorized pure-numpy fallback.  The active path is
chosen at import time; set ``ABCMU_NO_NUMBA=1`` to force the fallback.
The two paths may differ in the last few ulps (different summation
order); all statistical contracts are tolerance-based.

Quantiles use the inverted-CDF-with-averaging convention: with sorted
values ``y`` and ``h = n * p``, return ``(y[h-1] + y[h]) / 2`` when ``h``
is an integer and ``y[floor(h)]`` otherwise.  The median is the 0.5
quantile, i.e. the average of the two middle order statistics for even
``n``.
"""

from __future__ import annotations

import os
import types

import numpy as np

NUMBA_ENV_FLAG = "ABCMU_NO_NUMBA"


def _numba_disabled() -> bool:
    return os.environ.get(NUMBA_ENV_FLAG, "").strip() not in ("", "0")


# ---------------------------------------------------------------------------
# numpy fallback implementations


def _np_mean(x):
    return float(np.mean(x))


def _np_quantile(x, p):
    y = np.sort(x)
    n = y.size
    h = n * p
    i = int(h)
    if h == i:
        if i <= 0:
            return float(y[0])
        return 0.5 * float(y[i - 1] + y[i])
    return float(y[min(i, n - 1)])


def _np_median(x):
    return _np_quantile(x, 0.5)


def _np_sd(x):
    if x.size < 2:
        return 0.0
    return float(np.std(x, ddof=1))


def _np_symm(x):
    return _np_mean(x) - _np_median(x)


def _np_weight_uniform_box(eps, tau):
    w = 1.0
    for k in range(eps.size):
        t = tau[k]
        if np.isinf(t):
            continue
        if abs(eps[k]) > t / 2.0:
            return 0.0
        w *= 1.0 / t
    return w


def _np_weight_gaussian(eps, tau):
    finite = np.isfinite(tau)
    t = tau[finite]
    e = eps[finite]
    if t.size == 0:
        return 1.0
    logw = -0.5 * np.sum(np.log(2.0 * np.pi * t * t)) - 0.5 * np.sum(e * e / (t * t))
    return float(np.exp(logw))


def _np_weight_laplace(eps, tau):
    finite = np.isfinite(tau)
    t = tau[finite]
    e = eps[finite]
    if t.size == 0:
        return 1.0
    logw = -np.sum(np.log(t)) - 2.0 * np.sum(np.abs(e) / t)
    return float(np.exp(logw))


def _np_weight_geometric(eps, tau):
    finite = np.isfinite(tau)
    t = tau[finite]
    e = eps[finite]
    if t.size == 0:
        return 1.0
    return float(2.0 ** (-np.sum(np.abs(e) / t)))


def _np_autocovariance(x, max_lag):
    n = x.size
    mu = np.mean(x)
    d = x - mu
    out = np.empty(max_lag + 1)
    for lag in range(max_lag + 1):
        out[lag] = np.dot(d[: n - lag], d[lag:]) / n
    return out


# ---------------------------------------------------------------------------
# numba loop implementations (compiled below when the fast path is active)


def _nb_mean(x):
    s = 0.0
    for i in range(x.size):
        s += x[i]
    return s / x.size


def _nb_quantile(x, p):
    y = np.sort(x)
    n = y.size
    h = n * p
    i = int(h)
    if h == i:
        if i <= 0:
            return y[0]
        return 0.5 * (y[i - 1] + y[i])
    if i > n - 1:
        i = n - 1
    return y[i]


def _nb_sd(x):
    n = x.size
    if n < 2:
        return 0.0
    s = 0.0
    for i in range(n):
        s += x[i]
    mu = s / n
    acc = 0.0
    for i in range(n):
        d = x[i] - mu
        acc += d * d
    return np.sqrt(acc / (n - 1))


def _nb_weight_uniform_box(eps, tau):
    w = 1.0
    for k in range(eps.size):
        t = tau[k]
        if np.isinf(t):
            continue
        if abs(eps[k]) > t / 2.0:
            return 0.0
        w *= 1.0 / t
    return w


def _nb_weight_gaussian(eps, tau):
    logw = 0.0
    for k in range(eps.size):
        t = tau[k]
        if np.isinf(t):
            continue
        logw += -0.5 * np.log(2.0 * np.pi * t * t) - 0.5 * eps[k] * eps[k] / (t * t)
    return np.exp(logw)


def _nb_weight_laplace(eps, tau):
    logw = 0.0
    for k in range(eps.size):
        t = tau[k]
        if np.isinf(t):
            continue
        logw += -np.log(t) - 2.0 * abs(eps[k]) / t
    return np.exp(logw)


def _nb_weight_geometric(eps, tau):
    s = 0.0
    for k in range(eps.size):
        t = tau[k]
        if np.isinf(t):
            continue
        s += abs(eps[k]) / t
    return 2.0 ** (-s)


def _nb_autocovariance(x, max_lag):
    n = x.size
    s = 0.0
    for i in range(n):
        s += x[i]
    mu = s / n
    out = np.empty(max_lag + 1)
    for lag in range(max_lag + 1):
        acc = 0.0
        for i in range(n - lag):
            acc += (x[i] - mu) * (x[i + lag] - mu)
        out[lag] = acc / n
    return out


def _build_numpy_backend():
    b = types.SimpleNamespace()
    b.name = "numpy"
    b.mean = _np_mean
    b.median = _np_median
    b.quantile = _np_quantile
    b.sd = _np_sd
    b.symm = _np_symm
    b.weight_uniform_box = _np_weight_uniform_box
    b.weight_gaussian = _np_weight_gaussian
    b.weight_laplace = _np_weight_laplace
    b.weight_geometric = _np_weight_geometric
    b.autocovariance = _np_autocovariance
    return b


def _build_numba_backend():
    from numba import njit

    jit = lambda f: njit(cache=True)(f)  # noqa: E731
    b = types.SimpleNamespace()
    b.name = "numba"
    b.mean = jit(_nb_mean)
    b.quantile = jit(_nb_quantile)
    quantile = b.quantile
    mean = b.mean

    @jit
    def median(x):
        return quantile(x, 0.5)

    @jit
    def symm(x):
        return mean(x) - quantile(x, 0.5)

    b.median = median
    b.symm = symm
    b.sd = jit(_nb_sd)
    b.weight_uniform_box = jit(_nb_weight_uniform_box)
    b.weight_gaussian = jit(_nb_weight_gaussian)
    b.weight_laplace = jit(_nb_weight_laplace)
    b.weight_geometric = jit(_nb_weight_geometric)
    b.autocovariance = jit(_nb_autocovariance)
    return b


numpy_backend = _build_numpy_backend()

if _numba_disabled():
    numba_backend = None
    active = numpy_backend
else:
    try:
        numba_backend = _build_numba_backend()
        active = numba_backend
    except ImportError:  # pragma: no cover - numba is a hard dependency
        numba_backend = None
        active = numpy_backend


def using_numba() -> bool:
    return active is not numpy_backend


mean = active.mean
median = active.median
quantile = active.quantile
sd = active.sd
symm = active.symm
weight_uniform_box = active.weight_uniform_box
weight_gaussian = active.weight_gaussian
weight_laplace = active.weight_laplace
weight_geometric = active.weight_geometric
autocovariance = active.autocovariance
