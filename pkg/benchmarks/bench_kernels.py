#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallbacks.

Usage:
    python benchmarks/bench_kernels.py [--size 1000000] [--repeats 5]

Times the three hot kernels on representative workloads (Stieltjes-scale
Cantor sampling, orbit-grid phase tables, projection-scale isotonic
regression) and one end-to-end operation, then prints a table with the
speedup of the jitted path.  Each kernel is warmed once before timing so
JIT compilation is not billed to the measurement.
"""

import argparse
import time

import numpy as np

from timespq import kernels


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=1_000_000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    try:
        numba_impls = kernels._build_numba_kernels()
    except ImportError:
        print("numba unavailable; nothing to compare")
        return 1
    numpy_impls = (kernels._cantor_values_numpy, kernels._phases_numpy,
                   kernels._pav_l2_numpy)

    n = args.size
    den = np.int64(2 * 3 ** 13)
    nums = (np.arange(n, dtype=np.int64) * 7919) % (int(den) + 1)
    residues = np.arange(n, dtype=np.int64) % 99991
    rng = np.random.default_rng(0)
    ramp = np.sort(rng.random(n)) + 0.05 * rng.standard_normal(n)

    cases = [
        ("cantor_values", lambda impl: impl(nums, den, np.int64(64))),
        ("unit_phases", lambda impl: impl(residues, np.int64(7), np.int64(99991))),
        ("pav_l2", lambda impl: impl(ramp)),
    ]

    print(f"n = {n}, repeats = {args.repeats} (best-of)")
    print(f"{'kernel':<16} {'numpy [s]':>10} {'numba [s]':>10} {'speedup':>8}")
    for (name, call), np_impl, nb_impl in zip(cases, numpy_impls, numba_impls):
        call(nb_impl)  # warm the JIT
        t_np = best_of(lambda: call(np_impl), args.repeats)
        t_nb = best_of(lambda: call(nb_impl), args.repeats)
        print(f"{name:<16} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>7.1f}x")

    # end-to-end: a depth-12 Stieltjes coefficient of the Cantor distribution
    from timespq.transfer import CantorMap, DistributionFunction, stieltjes_fourier

    def end_to_end():
        dist = DistributionFunction(CantorMap())  # fresh cache each run
        return stieltjes_fourier(dist, 4, 12)

    # swap the module-level binding to time both paths through the real API
    original = kernels._cantor_impl
    try:
        kernels._cantor_impl = numpy_impls[0]
        t_np = best_of(end_to_end, max(1, args.repeats // 2))
        kernels._cantor_impl = numba_impls[0]
        end_to_end()
        t_nb = best_of(end_to_end, max(1, args.repeats // 2))
    finally:
        kernels._cantor_impl = original
    print(f"{'stieltjes d=12':<16} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
