#!/usr/bin/env python3
"""Benchmark the hot kernels: numba JIT versus the pure-numpy fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py

The same workloads execute on both kernel sets (results are checked to
agree), and a small table reports best-of-five wall times.
"""

import time

import numpy as np

from equidyn import _kernels
from equidyn.backend import numba_available


def best_of(fn, repeat=5):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def workloads():
    rng = np.random.default_rng(42)
    dense = rng.normal(size=257) + 1j * rng.normal(size=257)
    cyclo = np.zeros(256, dtype=complex)
    cyclo[0], cyclo[-1] = -1.0, 1.0
    horner_c = rng.normal(size=65) + 1j * rng.normal(size=65)
    horner_z = rng.normal(size=1_000_000) + 1j * rng.normal(size=1_000_000)
    # flagship torus map at period 10: det(A^10 - I) = 5^10 - tr(A^10) + 1
    lattice = (4_756_341, 1_234_567, 2_718_281, 314_159,
               9_643_127, 1, 9_643_127, 16)
    return [
        ("aberth deg-256 random",
         lambda k: k.all_roots(dense)[0]),
        ("aberth z^255 - 1",
         lambda k: k.all_roots(cyclo)[0]),
        ("horner deg-64 x 1e6 pts",
         lambda k: k.horner_many(horner_c, horner_z)),
        ("lattice bins |det|~9.6e6",
         lambda k: k.lattice_bin_counts(*lattice)),
    ]


def main():
    kernel_sets = [_kernels.build("numpy")]
    if numba_available():
        kernel_sets.append(_kernels.build("numba"))
    else:
        print("numba unavailable: benchmarking the numpy fallback only")
    # warm up (JIT compilation happens here, off the clock)
    for name, work in workloads():
        for kern in kernel_sets:
            work(kern)
    header = f"{'workload':<28}" + "".join(
        f"{k.name:>12}" for k in kernel_sets)
    if len(kernel_sets) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, work in workloads():
        times = []
        results = []
        for kern in kernel_sets:
            t, res = best_of(lambda k=kern: work(k))
            times.append(t)
            results.append(np.asarray(res))
        if len(results) == 2:
            a = results[0].ravel().astype(complex)
            b = results[1].ravel().astype(complex)
            scale = max(1.0, np.abs(a).max())
            if name.startswith("aberth"):  # root sets, order-free
                err = np.abs(a[:, None] - b[None, :]).min(axis=1).max()
            else:
                err = np.abs(a - b).max()
            assert err < 1e-6 * scale, f"{name}: mismatch {err}"
        row = f"{name:<28}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
