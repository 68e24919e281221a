"""Dynamic-programming inner loops for edit metrics and alignment.

Two implementations of each kernel: a numba ``@njit`` version and a
vectorized numpy fallback. The fallback is selected by setting the
environment variable ``MORPHOTON_NO_NUMBA=1`` before import (useful on
platforms without a working JIT, and as the reference in benchmarks;
see bench/bench_kernels.py). Both paths are tested against each other
and against brute-force oracles.

Inputs are int arrays; use :func:`encode_symbols` to map strings or
symbol lists onto codes.
"""

from __future__ import annotations

import os
from typing import Sequence

import numpy as np

USE_NUMBA = os.environ.get("MORPHOTON_NO_NUMBA", "").lower() not in ("1", "true", "yes")


def encode_symbols(seq: Sequence[str] | str, table: dict[str, int] | None = None) -> np.ndarray:
    """Map a string (per codepoint) or symbol list to an int32 array."""
    if table is None:
        return np.fromiter((ord(c) for c in seq), dtype=np.int32, count=len(seq))
    return np.fromiter((table[s] for s in seq), dtype=np.int32, count=len(seq))


# --- pure-numpy fallbacks ---------------------------------------------------

_BIG = np.int32(1 << 20)


def _levenshtein_np(a: np.ndarray, b: np.ndarray) -> int:
    """Row-wise Levenshtein; the in-row insertion dependency is resolved
    with the minimum-accumulate transform min_k(row[k] + (j-k))."""
    n = len(b)
    steps = np.arange(n + 1, dtype=np.int32)
    prev = steps.copy()
    for i in range(1, len(a) + 1):
        cur = np.empty(n + 1, dtype=np.int32)
        cur[0] = i
        cur[1:] = np.minimum(prev[1:] + 1, prev[:-1] + (a[i - 1] != b))
        cur = np.minimum.accumulate(cur - steps) + steps
        prev = cur
    return int(prev[n])


def _indel_dp_np(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Full DP matrix for insert/delete-only distance (match cost 0)."""
    m, n = len(a), len(b)
    steps = np.arange(n + 1, dtype=np.int32)
    dp = np.empty((m + 1, n + 1), dtype=np.int32)
    dp[0] = steps
    for i in range(1, m + 1):
        diag = np.where(a[i - 1] == b, dp[i - 1, :-1], _BIG)
        row = np.empty(n + 1, dtype=np.int32)
        row[0] = i
        row[1:] = np.minimum(dp[i - 1, 1:] + 1, diag)
        dp[i] = np.minimum.accumulate(row - steps) + steps
    return dp


# --- numba kernels ----------------------------------------------------------

if USE_NUMBA:
    from numba import njit

    @njit(cache=True)
    def _levenshtein_jit(a, b):  # pragma: no cover - exercised via wrapper
        n = len(b)
        prev = np.arange(n + 1, dtype=np.int32)
        cur = np.empty(n + 1, dtype=np.int32)
        for i in range(1, len(a) + 1):
            cur[0] = i
            for j in range(1, n + 1):
                cost = 0 if a[i - 1] == b[j - 1] else 1
                best = prev[j - 1] + cost
                if prev[j] + 1 < best:
                    best = prev[j] + 1
                if cur[j - 1] + 1 < best:
                    best = cur[j - 1] + 1
                cur[j] = best
            prev, cur = cur, prev
        return int(prev[n])

    @njit(cache=True)
    def _indel_dp_jit(a, b):  # pragma: no cover - exercised via wrapper
        m, n = len(a), len(b)
        dp = np.empty((m + 1, n + 1), dtype=np.int32)
        for j in range(n + 1):
            dp[0, j] = j
        for i in range(1, m + 1):
            dp[i, 0] = i
            for j in range(1, n + 1):
                best = dp[i - 1, j] + 1
                if dp[i, j - 1] + 1 < best:
                    best = dp[i, j - 1] + 1
                if a[i - 1] == b[j - 1] and dp[i - 1, j - 1] < best:
                    best = dp[i - 1, j - 1]
                dp[i, j] = best
        return dp


def levenshtein(a: np.ndarray, b: np.ndarray) -> int:
    """Unit-cost insert/delete/substitute edit distance."""
    if len(a) == 0:
        return len(b)
    if len(b) == 0:
        return len(a)
    if USE_NUMBA:
        return _levenshtein_jit(a, b)
    return _levenshtein_np(a, b)


def indel_dp(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """DP matrix where matches are free and insert/delete cost 1."""
    if USE_NUMBA and len(a) and len(b):
        return _indel_dp_jit(a, b)
    return _indel_dp_np(a, b)
