#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat 5]

Times the two hot paths at sweep-realistic sizes: the renormalized
power iteration (the per-point inner loop of the direct-iteration
protocol) and the frequency-response grid behind the supremum search.
"""

import argparse
import time

import numpy as np

from ilcmap import _kernels_py

try:
    from ilcmap import _kernels_cy
except ImportError:
    _kernels_cy = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_iterate(repeat):
    rng = np.random.default_rng(42)
    rows = []
    for n, seeds, j_max in [(64, 7, 800), (128, 7, 800), (256, 7, 800)]:
        m = np.eye(n) - 0.3 * rng.standard_normal((n, n)) / np.sqrt(n)
        x0 = rng.standard_normal((n, seeds))
        t_py = best_of(lambda: _kernels_py.iterate_lognorms(m, x0, j_max),
                       repeat)
        t_cy = (best_of(lambda: _kernels_cy.iterate_lognorms(m, x0, j_max),
                        repeat) if _kernels_cy else None)
        rows.append((f"iterate n={n} seeds={seeds} j={j_max}", t_py, t_cy))
    return rows


def bench_t_grid(repeat):
    shifts = np.array([-1, 0, 1], dtype=np.int64)
    coeffs = np.array([1.0, 1.0, 1.0])
    thetas = np.linspace(0.0, np.pi, 1024)
    rows = []

    def many_py():
        for b in np.linspace(-0.9, 0.9, 100):
            _kernels_py.t_grid(0.5, b, 1.0, shifts, coeffs, thetas)

    def many_cy():
        for b in np.linspace(-0.9, 0.9, 100):
            _kernels_cy.t_grid(0.5, b, 1.0, shifts, coeffs, thetas)

    t_py = best_of(many_py, repeat)
    t_cy = best_of(many_cy, repeat) if _kernels_cy else None
    rows.append(("t_grid 1024 phases x 100 points", t_py, t_cy))
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    if _kernels_cy is None:
        print("compiled kernels not built; timing the numpy fallback only")
    print(f"{'case':38s} {'numpy':>10s} {'compiled':>10s} {'speedup':>8s}")
    for rows in (bench_iterate(args.repeat), bench_t_grid(args.repeat)):
        for name, t_py, t_cy in rows:
            if t_cy is None:
                print(f"{name:38s} {t_py * 1e3:9.2f}ms {'-':>10s} {'-':>8s}")
            else:
                print(f"{name:38s} {t_py * 1e3:9.2f}ms {t_cy * 1e3:9.2f}ms "
                      f"{t_py / t_cy:7.2f}x")


if __name__ == "__main__":
    main()
