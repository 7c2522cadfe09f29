# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the modular kernels in ``_fallback``.

Entries are residues in [0, P) with P < 2**30.04, so a product fits in 61
bits and up to 15 products can be summed in uint64 before reducing.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef uint64_t u64


cdef inline void _matmul(const u64* A, const u64* B, u64* C, Py_ssize_t n, u64 P) noexcept nogil:
    cdef Py_ssize_t i, j, k, k0, k1
    cdef u64 acc
    for i in range(n):
        for j in range(n):
            acc = 0
            k0 = 0
            while k0 < n:
                k1 = k0 + 15
                if k1 > n:
                    k1 = n
                for k in range(k0, k1):
                    acc += A[i * n + k] * B[k * n + j]
                acc %= P
                k0 = k1
            C[i * n + j] = acc


def matmul_mod(A, B, P):
    """Batched (..., N, N) product modulo ``P``."""
    cdef u64 p = P
    A = np.ascontiguousarray(A, dtype=np.uint64)
    B = np.ascontiguousarray(B, dtype=np.uint64)
    shape = A.shape
    nd = len(shape)
    if A.shape != B.shape or nd < 2 or shape[nd - 1] != shape[nd - 2]:
        raise ValueError("matmul_mod expects equal square batches")
    cdef Py_ssize_t n = shape[nd - 1]
    cdef Py_ssize_t batch = A.size // (n * n) if n else 0
    out = np.zeros(shape, dtype=np.uint64)
    cdef u64[::1] a = A.reshape(-1)
    cdef u64[::1] b = B.reshape(-1)
    cdef u64[::1] c = out.reshape(-1)
    cdef Py_ssize_t t
    if batch == 0:
        return out
    with nogil:
        for t in range(batch):
            _matmul(&a[t * n * n], &b[t * n * n], &c[t * n * n], n, p)
    return out


def trace_product(mats, word, P):
    """Tr(M[w0] M[w1] ...) for every point; ``mats`` has shape (slots, R, N, N)."""
    cdef u64 p = P
    mats = np.ascontiguousarray(mats, dtype=np.uint64)
    cdef cnp.intp_t[::1] w = np.ascontiguousarray(word, dtype=np.intp)
    cdef Py_ssize_t L = w.shape[0]
    cdef Py_ssize_t S = mats.shape[0]
    cdef Py_ssize_t R = mats.shape[1]
    cdef Py_ssize_t n = mats.shape[2]
    cdef u64[::1] m = mats.reshape(-1)
    out = np.zeros(R, dtype=np.uint64)
    cdef u64[::1] o = out
    cdef Py_ssize_t nn = n * n
    cdef Py_ssize_t r, l, i, k, k0, k1
    cdef u64 acc
    cdef u64* cur
    cdef u64* tmp
    cdef u64* swap
    cdef const u64* X
    cdef const u64* Y
    for l in range(L):
        if w[l] < 0 or w[l] >= S:
            raise IndexError("slot out of range")
    if L == 0:
        out[:] = n % p
        return out
    cur = <u64*> malloc(nn * sizeof(u64))
    tmp = <u64*> malloc(nn * sizeof(u64))
    if cur == NULL or tmp == NULL:
        free(cur)
        free(tmp)
        raise MemoryError()
    try:
        with nogil:
            for r in range(R):
                if L == 1:
                    X = &m[(w[0] * R + r) * nn]
                    acc = 0
                    for i in range(n):
                        acc += X[i * n + i]
                    o[r] = acc % p
                    continue
                # product of all but the last factor
                for i in range(nn):
                    cur[i] = m[(w[0] * R + r) * nn + i]
                for l in range(1, L - 1):
                    _matmul(cur, &m[(w[l] * R + r) * nn], tmp, n, p)
                    swap = cur
                    cur = tmp
                    tmp = swap
                # Tr(X Y) = sum_ik X_ik Y_ki
                Y = &m[(w[L - 1] * R + r) * nn]
                acc = 0
                for i in range(n):
                    k0 = 0
                    while k0 < n:
                        k1 = k0 + 15
                        if k1 > n:
                            k1 = n
                        for k in range(k0, k1):
                            acc += cur[i * n + k] * Y[k * n + i]
                        acc %= p
                        k0 = k1
                o[r] = acc
    finally:
        free(cur)
        free(tmp)
    return out


cdef u64 _inv(u64 a, u64 p) noexcept nogil:
    cdef u64 result = 1
    cdef u64 e = p - 2
    a %= p
    while e:
        if e & 1:
            result = result * a % p
        a = a * a % p
        e >>= 1
    return result


def rank_mod(A, P):
    """Dense row echelon over F_P; same pivot rules and output as the fallback."""
    cdef u64 p = P
    M_arr = np.array(A, dtype=np.uint64, copy=True, order="C")
    if M_arr.ndim != 2:
        raise ValueError("rank_mod expects a matrix")
    M_arr %= p
    cdef u64[:, ::1] M = M_arr
    cdef Py_ssize_t m = M.shape[0]
    cdef Py_ssize_t ncol = M.shape[1]
    order_arr = np.arange(m, dtype=np.intp)
    cdef cnp.intp_t[::1] order = order_arr
    cdef Py_ssize_t r = 0, c, i, j, pr
    cdef u64 inv, f, t
    cdef cnp.intp_t ti
    pivot_cols = []
    with nogil:
        for c in range(ncol):
            if r == m:
                break
            pr = -1
            for i in range(r, m):
                if M[i, c] != 0:
                    pr = i
                    break
            if pr < 0:
                continue
            if pr != r:
                for j in range(c, ncol):
                    t = M[r, j]
                    M[r, j] = M[pr, j]
                    M[pr, j] = t
                ti = order[r]
                order[r] = order[pr]
                order[pr] = ti
            inv = _inv(M[r, c], p)
            for j in range(c, ncol):
                M[r, j] = M[r, j] * inv % p
            for i in range(r + 1, m):
                f = M[i, c]
                if f == 0:
                    continue
                f = p - f
                for j in range(c, ncol):
                    M[i, j] = (M[i, j] + f * M[r, j]) % p
            with gil:
                pivot_cols.append(c)
            r += 1
    rows = sorted(int(x) for x in order_arr[:r])
    return r, rows, pivot_cols
