"""Compare the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--seed 0]

Both implementations are imported directly, so ``CURRENTCOH_PURE`` has no
effect here.  Outputs are checked for equality before timing.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from currentcoh import _fallback
from currentcoh.exactla import DEFAULT_PRIMES

try:
    from currentcoh import _kernels
except ImportError:  # extension not built
    _kernels = None

P = DEFAULT_PRIMES[0]


def _cases(rng: np.random.Generator):
    def mats(*shape):
        return rng.integers(0, P, size=shape, dtype=np.uint64)

    A, B = mats(64, 8, 8), mats(64, 8, 8)
    yield "matmul_mod 64x(8x8)", "matmul_mod", (A, B, P)
    A, B = mats(16, 21, 21), mats(16, 21, 21)
    yield "matmul_mod 16x(21x21)", "matmul_mod", (A, B, P)
    M = mats(6, 40, 7, 7)
    yield "trace_product len 6, N=7", "trace_product", (M, [0, 1, 2, 3, 4, 5], P)
    M = mats(4, 40, 21, 21)
    yield "trace_product len 4, N=21", "trace_product", (M, [0, 1, 2, 3], P)
    yield "rank_mod 120x150", "rank_mod", (mats(120, 150), P)
    low = mats(200, 20) @ np.ones((20, 1), dtype=np.uint64) % P  # rank-deficient
    yield "rank_mod 200x300 (deficient)", "rank_mod", (np.hstack([mats(200, 150), np.repeat(low, 150, axis=1)]), P)


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled extension not available; only the fallback can run")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':32s} {'fallback ms':>12s} {'compiled ms':>12s} {'speedup':>8s}")
    for label, name, call_args in _cases(rng):
        slow = getattr(_fallback, name)
        t_slow = min(timeit.repeat(lambda: slow(*call_args), number=1, repeat=args.repeat)) * 1e3
        if _kernels is None:
            print(f"{label:32s} {t_slow:12.2f} {'-':>12s} {'-':>8s}")
            continue
        fast = getattr(_kernels, name)
        if not _same(slow(*call_args), fast(*call_args)):
            print(f"{label:32s} MISMATCH")
            return 2
        t_fast = min(timeit.repeat(lambda: fast(*call_args), number=1, repeat=args.repeat)) * 1e3
        print(f"{label:32s} {t_slow:12.2f} {t_fast:12.2f} {t_slow / t_fast:7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
