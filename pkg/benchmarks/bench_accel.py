"""Compare the jit-compiled numeric primitives against the pure-numpy
fallbacks.

Run:  python benchmarks/bench_accel.py [--sizes 1000 100000] [--repeats 50]

Each primitive is timed on the same inputs with both backends; the jit path
is warmed once beforehand so compilation is not billed to the measurement.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from abcmu import accel


def _cases(n: int, rng: np.random.Generator):
    x = rng.standard_normal(n)
    eps = rng.standard_normal(8)
    tau = np.full(8, 0.7)
    return [
        ("mean", lambda b: b.mean(x)),
        ("median", lambda b: b.median(x)),
        ("quantile(0.25)", lambda b: b.quantile(x, 0.25)),
        ("sd", lambda b: b.sd(x)),
        ("symm", lambda b: b.symm(x)),
        ("weight_gaussian", lambda b: b.weight_gaussian(eps, tau)),
        ("weight_laplace", lambda b: b.weight_laplace(eps, tau)),
        ("autocovariance", lambda b: b.autocovariance(x, min(200, n - 1))),
    ]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+", default=[1_000, 100_000])
    parser.add_argument("--repeats", type=int, default=50)
    args = parser.parse_args()

    backends = [("numpy", accel.numpy_backend), ("numba", accel.numba_backend)]
    rng = np.random.default_rng(0)

    print(f"{'primitive':<18} {'n':>8} {'numpy (us)':>12} {'numba (us)':>12} {'speedup':>8}")
    for n in args.sizes:
        cases = _cases(n, rng)
        for name, call in cases:
            times = {}
            for label, backend in backends:
                call(backend)  # warm-up (jit compile / cache touch)
                t = timeit.timeit(lambda: call(backend), number=args.repeats)
                times[label] = t / args.repeats * 1e6
            speedup = times["numpy"] / times["numba"]
            print(
                f"{name:<18} {n:>8} {times['numpy']:>12.2f} "
                f"{times['numba']:>12.2f} {speedup:>7.2f}x"
            )


if __name__ == "__main__":
    main()
