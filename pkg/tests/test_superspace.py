from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from currentcoh.superspace import (
    AMonomial,
    Q_CHARGE,
    as_multidegree,
    canonical_multidegree,
    charges,
    enumerate_monomials,
    factorizations,
    level,
    multidegrees_at_level,
    multiply,
    symmetric_images,
)

monomials = st.builds(AMonomial, st.integers(0, 3), st.integers(0, 3), st.integers(0, 7))
degrees = st.tuples(*[st.integers(0, 3)] * 5)


def test_level_weights():
    assert level((1, 0, 0, 0, 0)) == 3
    assert level((0, 0, 1, 0, 0)) == 2
    assert level((0, 0, 3, 3, 3)) == 18
    assert level((1, 1, 2, 2, 2)) == 18


def test_as_multidegree_rejects_bad_input():
    with pytest.raises(ValueError):
        as_multidegree((1, 2, 3))
    with pytest.raises(ValueError):
        as_multidegree((0, 0, -1, 0, 0))


@pytest.mark.parametrize("L", range(0, 13))
def test_multidegrees_at_level(L):
    got = multidegrees_at_level(L)
    assert len(got) == len(set(got))
    assert all(level(n) == L for n in got)


def test_charges_known_sectors():
    h = Fraction(1, 2)
    assert charges(8, (0, 0, 3, 3, 3)).as_tuple() == (h, h, 5 * h, 5 * h, 5 * h)
    assert charges(8, (1, 1, 2, 2, 2)).as_tuple() == (0, 0, 3, 3, 3)
    assert Q_CHARGE.deg == 1


@given(st.integers(0, 6), degrees)
def test_charge_shift_by_one_letter(p, n):
    # a bare letter carries the supercharge's charge
    a, b = charges(p, n), charges(p + 1, n)
    assert (b - a).as_tuple() == Q_CHARGE.as_tuple()


@given(monomials, monomials, monomials)
def test_multiplication_associative(a, b, c):
    s1, ab = multiply(a, b)
    s2, bc = multiply(b, c)
    left = (0, None) if ab is None else multiply(ab, c)
    right = (0, None) if bc is None else multiply(a, bc)
    lhs = (s1 * left[0], left[1]) if ab is not None else (0, None)
    rhs = (s2 * right[0], right[1]) if bc is not None else (0, None)
    if lhs[1] is None or lhs[0] == 0:
        assert rhs[1] is None or rhs[0] == 0
    else:
        assert lhs == rhs


@given(monomials, monomials)
def test_graded_commutativity(a, b):
    s1, ab = multiply(a, b)
    s2, ba = multiply(b, a)
    assert ab == ba
    if ab is not None:
        assert s1 == s2 * (-1) ** (a.parity * b.parity)


@given(monomials)
def test_factorizations_multiply_back(m):
    for s, a, b in factorizations(m):
        assert not a.is_unit and not b.is_unit
        t, prod = multiply(a, b)
        assert prod == m and t == s


@given(degrees)
def test_canonical_multidegree_is_orbit_invariant(n):
    c = canonical_multidegree(n)
    assert c in symmetric_images(n)
    assert all(canonical_multidegree(x) == c for x in symmetric_images(n))
    assert level(c) == level(n)


def test_enumerate_monomials_counts():
    ms = enumerate_monomials((1, 1, 1, 1, 1))
    assert len(ms) == 2 * 2 * 8 - 1  # unit excluded
    assert AMonomial(0, 0, 0) not in ms
