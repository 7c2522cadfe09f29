from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from currentcoh import _fallback, exactla, kernels

P = exactla.DEFAULT_PRIMES[1]

try:
    from currentcoh import _kernels
except ImportError:  # pragma: no cover
    _kernels = None

compiled = pytest.mark.skipif(_kernels is None, reason="compiled kernels not built")


def rand(rng, *shape):
    return rng.integers(0, P, size=shape, dtype=np.int64).astype(np.uint64)


def test_backend_flag():
    assert kernels.BACKEND in ("compiled", "python")


def test_fallback_matmul_matches_object_arithmetic():
    rng = np.random.default_rng(0)
    A, B = rand(rng, 3, 4, 4), rand(rng, 3, 4, 4)
    got = _fallback.matmul_mod(A, B, P)
    want = np.array([(a.astype(object) @ b.astype(object)) % P for a, b in zip(A, B)], dtype=np.uint64)
    assert np.array_equal(got, want)


def test_fallback_trace_product_matches_direct():
    rng = np.random.default_rng(1)
    mats = rand(rng, 3, 5, 3, 3)
    word = [0, 2, 1, 2]
    got = _fallback.trace_product(mats, word, P)
    for r in range(5):
        X = np.eye(3, dtype=object)
        for w in word:
            X = X @ mats[w, r].astype(object)
        assert int(got[r]) == int(np.trace(X) % P)


@compiled
@settings(max_examples=30, deadline=None)
@given(st.integers(1, 7), st.integers(1, 4), st.integers(0, 2**31))
def test_compiled_matches_fallback(n, batch, seed):
    rng = np.random.default_rng(seed)
    A, B = rand(rng, batch, n, n), rand(rng, batch, n, n)
    assert np.array_equal(_kernels.matmul_mod(A, B, P), _fallback.matmul_mod(A, B, P))
    mats = rand(rng, 3, batch, n, n)
    word = list(rng.integers(0, 3, size=int(rng.integers(1, 6))))
    assert np.array_equal(_kernels.trace_product(mats, word, P), _fallback.trace_product(mats, word, P))


@compiled
@settings(max_examples=40, deadline=None)
@given(st.integers(1, 9), st.integers(1, 9), st.integers(0, 2**31), st.booleans())
def test_compiled_rank_matches_fallback(m, n, seed, low_rank):
    rng = np.random.default_rng(seed)
    A = rand(rng, m, n)
    if low_rank and m > 1:
        A[-1] = (A[0] * np.uint64(3)) % P
    assert _kernels.rank_mod(A, P) == _fallback.rank_mod(A, P)


def test_rank_mod_reports_pivots():
    A = np.array([[0, 0], [1, 2], [2, 4]], dtype=np.uint64)
    r, rows, cols = kernels.rank_mod(A, P)
    assert r == 1 and rows == [1] and cols == [0]


def test_trace_of_empty_word_is_size():
    mats = np.zeros((1, 2, 4, 4), dtype=np.uint64)
    assert kernels.trace_product(mats, [], P).tolist() == [4, 4]
