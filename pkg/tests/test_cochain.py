from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from currentcoh.cochain import (
    Cochain,
    differential,
    enumerate_basis,
    g_action,
    generator_table,
    normal_order,
    relative_invariants,
    weight_of,
)
from currentcoh.liealg import LieAlgebraSpec, build_algebra

SL2 = build_algebra(LieAlgebraSpec.parse("sl2"))
SO5 = build_algebra(LieAlgebraSpec.parse("so5"))


def random_cochain(g, rng, p, n, k=3):
    basis = enumerate_basis(g, p, n)
    picks = rng.sample(basis, min(k, len(basis)))
    return Cochain(g, {b: Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for b in picks})


@pytest.mark.parametrize("g", [SL2, SO5], ids=["sl2", "so5"])
@pytest.mark.parametrize("n", [(0, 0, 1, 1, 0), (1, 0, 1, 1, 0), (0, 1, 2, 0, 1), (1, 1, 0, 1, 1)])
def test_d_squared_on_basis(g, n):
    for p in range(1, sum(n)):
        for key in enumerate_basis(g, p, n)[:150]:
            assert not differential(differential(Cochain(g, {key: 1})))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_d_is_an_odd_derivation(seed):
    rng = random.Random(seed)
    a = random_cochain(SL2, rng, 1, (0, 0, 1, 0, 0))
    b = random_cochain(SL2, rng, 2, (0, 1, 1, 0, 1))
    if not a or not b:
        return
    t = generator_table(SL2)
    pa = sum(t.parity(x) for x in next(iter(a.terms))) & 1
    lhs = differential(a * b)
    rhs = differential(a) * b + (a * differential(b)).scale(-1 if pa else 1)
    assert not (lhs - rhs)


def test_normal_order_sign_and_vanishing():
    t = generator_table(SL2)
    from currentcoh.superspace import AMonomial

    odd = [t.gid(a, AMonomial(1, 0, 0)) for a in range(2)]  # z-letters are odd generators
    s, key = normal_order((odd[1], odd[0]), t)
    s2, key2 = normal_order((odd[0], odd[1]), t)
    assert key == key2 and s == -s2
    assert normal_order((odd[0], odd[0]), t)[0] == 0


@pytest.mark.parametrize("g", [SL2, SO5], ids=["sl2", "so5"])
def test_relative_invariants_are_invariant(g):
    for p, n in [(2, (0, 0, 1, 1, 0)), (2, (1, 1, 0, 0, 0)), (3, (0, 0, 2, 1, 1))]:
        for c in relative_invariants(g, p, n):
            for a in range(g.dim):
                assert not g_action(a, c)


def test_invariants_full_and_fast_agree():
    for n in [(0, 0, 1, 1, 0), (0, 0, 2, 1, 1), (1, 0, 1, 1, 0)]:
        for p in range(1, sum(n) + 1):
            assert len(relative_invariants(SL2, p, n)) == len(relative_invariants(SL2, p, n, full=True))


def test_weights_of_basis_are_sums():
    for key in enumerate_basis(SL2, 2, (0, 0, 1, 1, 0), weight_zero=True):
        assert not any(weight_of(SL2, key))


def test_json_round_trip():
    rng = random.Random(0)
    c = random_cochain(SO5, rng, 2, (0, 0, 1, 1, 1), k=5)
    assert Cochain.from_json(SO5, c.to_json()) == c


def test_sector_of_inhomogeneous_cochain_raises():
    rng = random.Random(1)
    c = random_cochain(SL2, rng, 1, (0, 0, 1, 0, 0)) + random_cochain(SL2, rng, 2, (0, 0, 1, 1, 0))
    with pytest.raises(ValueError):
        c.sector()
