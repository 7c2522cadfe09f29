from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from currentcoh import exactla
from currentcoh.exactla import SparseMatrix

P = exactla.DEFAULT_PRIMES[0]

small_matrices = st.integers(1, 6).flatmap(
    lambda m: st.integers(1, 6).flatmap(lambda n: st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n), min_size=m, max_size=m))
)


def test_is_prime_small():
    primes = [n for n in range(60) if exactla.is_prime(n)]
    assert primes == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]


def test_choose_primes_window_and_determinism():
    a = exactla.choose_primes(3, seed=5)
    assert a == exactla.choose_primes(3, seed=5)
    assert len(set(a)) == 3
    for p in a:
        assert exactla.PRIME_LOW <= p < exactla.PRIME_HIGH
        assert exactla.is_prime(p)
        # accumulation budget used by the kernels
        assert 15 * p * p < 2**64
    assert not set(exactla.choose_primes(2, seed=5, exclude=a[:2])) & set(a[:2])


def test_to_mod_fractions():
    assert exactla.to_mod(Fraction(1, 2), 7) == 4
    assert exactla.to_mod(-1, 7) == 6
    with pytest.raises(ZeroDivisionError):
        exactla.to_mod(Fraction(1, 7), 7)


@given(small_matrices)
def test_modular_rank_matches_bareiss(rows):
    M = SparseMatrix.from_dense(rows)
    r = exactla.bareiss_rank(rows)
    assert exactla.rank(M).rank == r
    assert exactla.rank_rational(M) == r
    assert exactla.dense_rank_mod(np.array(rows, dtype=np.int64) % P, P) == r


@given(small_matrices)
def test_nullspace_vectors_are_killed(rows):
    M = SparseMatrix.from_dense(rows)
    ns = exactla.nullspace_basis(M)
    assert len(ns) == M.cols - exactla.rank_rational(M)
    for v in ns:
        x = [v.get(j, 0) for j in range(M.cols)]
        assert not any(M.matvec(x))
    for v in exactla.nullspace_basis(M, P):
        x = [v.get(j, 0) for j in range(M.cols)]
        assert all(int(y) % P == 0 for y in M.matvec(x))


@given(small_matrices, st.lists(st.integers(-3, 3), min_size=6, max_size=6))
def test_span_membership_certified(rows, coeffs):
    M = SparseMatrix.from_dense(rows)
    v = M.matvec(coeffs[: M.cols])
    verdict = exactla.in_span(M, v, certify=True)
    assert verdict.in_span and verdict.certified
    x = exactla.solve_rational(M, v)
    assert [Fraction(y) for y in M.matvec(x)] == [Fraction(y) for y in v]


def test_span_rejects_outside_vector():
    M = SparseMatrix.from_dense([[1, 0], [0, 0], [0, 1]])
    assert not exactla.in_span(M, [0, 1, 0]).in_span
    assert exactla.solve_rational(M, [0, 1, 0]) is None


def test_sparse_matrix_round_trip():
    dense = [[0, 2, 0], [1, 0, -3]]
    M = SparseMatrix.from_dense(dense)
    assert M.nnz == 3
    assert [list(r) for r in M.to_dense()] == dense
    assert [list(r) for r in M.transpose().to_dense()] == [list(c) for c in zip(*dense)]


def test_cokernel_dim():
    M = SparseMatrix.from_dense([[1, 1], [2, 2], [0, 1]])
    assert exactla.cokernel_dim(M) == 1


@settings(max_examples=200)
@given(st.integers(-1000, 1000), st.integers(1, 1000))
def test_rational_reconstruction(a, b):
    f = Fraction(a, b)
    residue = f.numerator * pow(f.denominator, -1, P) % P
    assert exactla.rational_reconstruct(residue, P) == f
