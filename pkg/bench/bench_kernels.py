"""Benchmark the numba DP kernels against the pure-numpy fallback.

Runs each kernel on random symbol sequences at several lengths and
prints a timing table. The fallback is what you get with
MORPHOTON_NO_NUMBA=1; here both paths are called directly so a single
process can compare them.

Usage: python bench/bench_kernels.py [--repeats 200]
"""

import argparse
import time

import numpy as np

from morphoton import kernels


def time_fn(fn, pairs, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for a, b in pairs:
            fn(a, b)
        best = min(best, time.perf_counter() - t0)
    return best / len(pairs)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=50)
    ap.add_argument("--pairs", type=int, default=20)
    args = ap.parse_args()

    if not kernels.USE_NUMBA:
        raise SystemExit("run without MORPHOTON_NO_NUMBA so both paths are available")

    rng = np.random.default_rng(0)
    rows = []
    for length in (8, 32, 128, 512):
        pairs = [
            (
                rng.integers(0, 30, size=length).astype(np.int32),
                rng.integers(0, 30, size=length).astype(np.int32),
            )
            for _ in range(args.pairs)
        ]
        # trigger jit compilation outside the timed region
        kernels._levenshtein_jit(pairs[0][0], pairs[0][1])
        kernels._indel_dp_jit(pairs[0][0], pairs[0][1])
        for name, jit, ref in (
            ("levenshtein", kernels._levenshtein_jit, kernels._levenshtein_np),
            ("indel_dp", kernels._indel_dp_jit, kernels._indel_dp_np),
        ):
            t_jit = time_fn(jit, pairs, args.repeats)
            t_np = time_fn(ref, pairs, args.repeats)
            rows.append((name, length, t_np * 1e6, t_jit * 1e6, t_np / t_jit))

    print(f"{'kernel':<12} {'len':>5} {'numpy (us)':>12} {'numba (us)':>12} {'speedup':>8}")
    for name, length, t_np, t_jit, speedup in rows:
        print(f"{name:<12} {length:>5} {t_np:>12.1f} {t_jit:>12.1f} {speedup:>7.1f}x")


if __name__ == "__main__":
    main()
