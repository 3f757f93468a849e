"""Timing comparison of the two classical-map kernel backends.

Runs the weighted second-moment series kernel (the hot loop behind every
ensemble propagation) through both the numba path and the numpy fallback
on an identical workload, after a warm-up pass so jit compilation never
lands inside a timed region.  Results also cross-check that the two
backends produce the same series, since they share one floating-point
evaluation order.

Usage: python3 benchmarks/bench_classical.py [--samples N] [--kicks N]
       [--repeats N]
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from rotorlab._kernels import (
    HAS_NUMBA,
    weighted_sq_series_numpy,
)

if HAS_NUMBA:
    from rotorlab._kernels import weighted_sq_series_numba


def make_workload(samples: int, seed: int = 0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2.0 * math.pi, samples)
    l_tilde = rng.choice([1.0, -0.5, 0.25], samples)
    weights = np.full(samples, 1.0 / samples)
    return theta, l_tilde, weights


def time_backend(kernel, samples: int, kicks: int, repeats: int) -> tuple[float, np.ndarray]:
    best = math.inf
    series = np.empty(kicks + 1)
    for _ in range(repeats):
        theta, l_tilde, weights = make_workload(samples)
        start = time.perf_counter()
        kernel(theta, l_tilde, weights, 2.5, kicks, series)
        best = min(best, time.perf_counter() - start)
    return best, series.copy()


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=300_000)
    parser.add_argument("--kicks", type=int, default=60)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    print(f"workload: {args.samples} trajectories x {args.kicks} kicks, best of {args.repeats}")

    t_numpy, series_numpy = time_backend(
        weighted_sq_series_numpy, args.samples, args.kicks, args.repeats
    )
    print(f"numpy : {t_numpy * 1e3:9.2f} ms")

    if not HAS_NUMBA:
        print("numba : unavailable in this environment (fallback only)")
        return 0

    # warm-up outside the timed region: first call compiles
    theta, l_tilde, weights = make_workload(64)
    weighted_sq_series_numba(theta, l_tilde, weights, 2.5, 2, np.empty(3))

    t_numba, series_numba = time_backend(
        weighted_sq_series_numba, args.samples, args.kicks, args.repeats
    )
    print(f"numba : {t_numba * 1e3:9.2f} ms")
    print(f"speedup (numpy / numba): {t_numpy / t_numba:.2f}x")

    drift = float(np.max(np.abs(series_numpy - series_numba)))
    print(f"max series difference between backends: {drift:.3e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
