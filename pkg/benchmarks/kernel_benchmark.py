"""Throughput comparison of the compiled kernels against the pure-Python
fallback.

Usage: python benchmarks/kernel_benchmark.py [-n SAMPLES] [--repeats K]

Reports updates/second per kernel and the compiled/pure speedup, and
asserts that both implementations produce bit-identical traces.
"""

import argparse
import time

import numpy as np

from qewa._kernels import _pyk

try:
    from qewa._kernels import _ck
except ImportError:
    _ck = None


def time_run(fn, xs, args, trace, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(xs, *args, trace)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-n", type=int, default=1_000_000,
                    help="samples per run (default 1e6)")
    ap.add_argument("--repeats", type=int, default=3,
                    help="timing repeats, best-of (default 3)")
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    xs = rng.normal(0.0, 1.0, args.n)

    kernels = [
        ("qewa", "qewa_path", (0.7, 0.05, 0.0005, 10)),
        ("dumiqe", "dumiqe_path", (0.7, 0.05)),
        ("frugal", "frugal_path", (0.7, 0.1)),
        ("ewa_mean", "ewa_path", (0.1,)),
    ]

    print(f"{args.n:,} samples, best of {args.repeats} runs\n")
    print(f"{'kernel':<10} {'pure (s)':>10} {'compiled (s)':>13} {'speedup':>9}")
    for name, attr, kargs in kernels:
        t_py = np.empty(args.n)
        dt_py = time_run(getattr(_pyk, attr), xs, kargs, t_py, args.repeats)
        if _ck is None:
            print(f"{name:<10} {dt_py:>10.3f} {'n/a':>13} {'n/a':>9}")
            continue
        t_c = np.empty(args.n)
        dt_c = time_run(getattr(_ck, attr), xs, kargs, t_c, args.repeats)
        if not np.array_equal(t_py, t_c):
            raise SystemExit(f"{name}: compiled and pure traces differ")
        print(f"{name:<10} {dt_py:>10.3f} {dt_c:>13.3f} {dt_py / dt_c:>8.1f}x")

    if _ck is None:
        print("\ncompiled kernel not built; showing pure-Python timings only")
    else:
        print("\nall compiled traces bit-identical to the pure-Python fallback")


if __name__ == "__main__":
    main()
