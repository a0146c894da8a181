"""Timing comparison of the jit and plain-numpy kernel backends.

Runs every hot kernel at a few image sizes under both backends and
prints per-kernel medians plus the speedup ratio. The jit backend is
warmed up before timing so compilation cost never pollutes a sample.

Usage:
    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --sizes 256 1024 --repeats 9
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time

import numpy as np

from texcurve import kernels


def _inputs(size: int, rng: np.random.Generator) -> dict:
    rgba = rng.integers(0, 256, size=(size, size, 4), dtype=np.uint8)
    gray = rng.integers(0, 256, size=(size, size), dtype=np.uint8)
    n_records = size * 16
    idx_i = rng.integers(0, 8, size=n_records).astype(np.int64)
    idx_j = (idx_i + 1 + rng.integers(0, 7, size=n_records).astype(np.int64)) % 8
    outcomes = rng.choice([0.0, 0.5, 1.0], size=n_records)
    return {
        "luma": lambda: kernels.luma_u8(rgba),
        "hsv": lambda: kernels.rgb_to_hsv_u8(rgba),
        "sobel": lambda: kernels.sobel_gradients(gray),
        "histogram": lambda: kernels.count_values_u8(gray.reshape(-1)),
        "elo_pass": lambda: kernels.elo_pass(idx_i, idx_j, outcomes, 32.0, 1000.0, 8),
    }


def _median_time(fn, repeats: int) -> float:
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def run(sizes: list[int], repeats: int) -> int:
    if not kernels.NUMBA_AVAILABLE:
        print("jit backend unavailable; nothing to compare", file=sys.stderr)
        return 1
    rng = np.random.default_rng(0)
    print(f"{'kernel':<12} {'size':>6} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for size in sizes:
        workloads = _inputs(size, rng)
        for name, fn in workloads.items():
            times = {}
            for backend in ("numpy", "numba"):
                kernels.set_backend(backend)
                fn()  # warm-up: jit compile and cache effects
                times[backend] = _median_time(fn, repeats)
            ratio = times["numpy"] / times["numba"]
            print(
                f"{name:<12} {size:>6} {times['numpy'] * 1e3:>10.3f}ms "
                f"{times['numba'] * 1e3:>10.3f}ms {ratio:>8.1f}x"
            )
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[128, 512, 1024],
                        help="square image edge lengths to benchmark")
    parser.add_argument("--repeats", type=int, default=7,
                        help="timed runs per kernel; the median is reported")
    args = parser.parse_args(argv)
    return run(args.sizes, args.repeats)


if __name__ == "__main__":
    sys.exit(main())
