"""Pure numpy implementations of the hot kernels.

These mirror ``_kernels.pyx`` exactly and are used when the compiled
extension is unavailable (or when ``CURRENTCOH_PURE=1``).
"""
from __future__ import annotations

import numpy as np


def matmul_mod(A: np.ndarray, B: np.ndarray, P: int) -> np.ndarray:
    """Batched (..., N, N) product modulo ``P`` for entries in [0, P)."""
    N = A.shape[-1]
    # with P < 2**30.01 each partial sum of <= 15 products fits in uint64
    if N <= 15:
        return np.matmul(A, B) % P
    out = np.zeros(A.shape[:-1] + (B.shape[-1],), dtype=np.uint64)
    for k0 in range(0, N, 15):
        out = (out + np.matmul(A[..., k0:k0 + 15], B[..., k0:k0 + 15, :]) % P) % P
    return out


def trace_product(mats: np.ndarray, word, P: int) -> np.ndarray:
    """Tr(M[w0] M[w1] ... ) for every point; ``mats`` has shape (slots, R, N, N)."""
    word = list(word)
    if len(word) == 1:
        return np.trace(mats[word[0]], axis1=1, axis2=2) % P
    prod = mats[word[0]]
    for w in word[1:-1]:
        prod = matmul_mod(prod, mats[w], P)
    last = mats[word[-1]]
    # Tr(XY) = sum_ij X_ij Y_ji, reduced row by row to stay inside uint64
    acc = np.zeros(prod.shape[0], dtype=np.uint64)
    N = prod.shape[1]
    for i in range(N):
        acc = (acc + (prod[:, i, :] * last[:, :, i]).sum(axis=1) % P) % P
    return acc


def rank_mod(A: np.ndarray, P: int) -> tuple[int, list[int], list[int]]:
    """Row echelon rank of a dense matrix over F_P.

    Returns ``(rank, pivot_rows, pivot_cols)`` where ``pivot_rows`` are indices
    into the original rows forming a basis of the row space.  Pivoting is
    deterministic: lowest column first, then lowest original row.
    """
    M = np.array(A, dtype=np.uint64) % P
    m, n = M.shape
    order = list(range(m))
    r = 0
    pivot_cols = []
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            M[[r, pr]] = M[[pr, r]]
            order[r], order[pr] = order[pr], order[r]
        inv = pow(int(M[r, c]), P - 2, P)
        M[r, c:] = (M[r, c:] * np.uint64(inv)) % P
        below = r + 1 + np.nonzero(M[r + 1:, c])[0]
        if below.size:
            f = M[below, c].copy()
            # row_i <- row_i - f_i * row_r  ==  row_i + (P - f_i) * row_r
            upd = ((P - f)[:, None] * M[r, c:][None, :]) % P
            M[below, c:] = (M[below, c:] + upd) % P
        pivot_cols.append(c)
        r += 1
    return r, sorted(order[:r]), pivot_cols
