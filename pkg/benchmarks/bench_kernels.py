#!/usr/bin/env python3
"""Time the numba kernels against the pure-numpy fallback.

Usage:
    python benchmarks/bench_kernels.py [--repeats N]

Both backends are imported directly, so the PVMPI_DISABLE_NUMBA flag is
irrelevant here.  The first numba call per kernel pays compilation (or
loads the on-disk cache); timings below exclude it via a warmup call.
"""

import argparse
import time

import numpy as np

from pvmpi.kernels import _nb, _np


def timeit(fn, args, repeats):
    fn(*args)  # warmup / JIT
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    n = 200_000
    u = rng.uniform(1e-6, 1 - 1e-6, n)
    v = rng.uniform(1e-6, 1 - 1e-6, n)
    w = rng.uniform(1e-6, 1 - 1e-6, n)
    scen = rng.random((500, 11))
    obs = rng.random(11)
    lo = np.full(11, 0.2)
    hi = np.full(11, 0.8)
    x = rng.normal(size=3000)
    y = 0.5 * x + rng.normal(size=3000)

    cases = [
        ("norm_ppf", (u,)),
        ("gauss_logpdf", (u, v, 0.7)),
        ("gauss_hinv", (w, v, 0.7)),
        ("clayton_logpdf", (u, v, 2.0)),
        ("clayton_hinv", (w, v, 2.0)),
        ("gumbel_logpdf", (u, v, 2.0)),
        ("gumbel_hinv", (w, v, 2.0)),
        ("frank_logpdf", (u, v, 5.0)),
        ("frank_hinv", (w, v, 5.0)),
        ("kendall_tau", (x, y)),
        ("energy_score", (obs, scen)),
        ("vario_pair_means", (scen, 0.5)),
        ("coverage_fraction", (scen, lo, hi)),
    ]

    print(f"{'kernel':<20} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for name, call_args in cases:
        t_np = timeit(getattr(_np, name), call_args, args.repeats)
        t_nb = timeit(getattr(_nb, name), call_args, args.repeats)
        print(f"{name:<20} {t_np * 1e3:>10.2f}ms {t_nb * 1e3:>10.2f}ms {t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
