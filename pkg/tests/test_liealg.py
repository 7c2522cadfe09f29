from __future__ import annotations

import itertools
import random
from fractions import Fraction

import numpy as np
import pytest

from currentcoh.liealg import LieAlgebraSpec, bracket, build_algebra, weyl_orbit_average

DIMS = {"sl2": 3, "gl2": 4, "sl3": 8, "so3": 3, "so5": 10, "sp4": 10, "so7": 21, "sp6": 21, "so8": 28, "gl3": 9}
WEYL = {"sl2": 2, "sl3": 6, "so5": 8, "sp4": 8, "so7": 48, "sp6": 48, "so8": 192}


def alg(name):
    return build_algebra(LieAlgebraSpec.parse(name))


@pytest.mark.parametrize("text,name", [("sl2", "sl2"), ("SO_7", "so7"), (" sp 6 ", "sp6")])
def test_parse(text, name):
    assert LieAlgebraSpec.parse(text).name == name


@pytest.mark.parametrize("text", ["g2", "sp3", "sl0", ""])
def test_parse_rejects(text):
    with pytest.raises(ValueError):
        LieAlgebraSpec.parse(text)


@pytest.mark.parametrize("name,dim", sorted(DIMS.items()))
def test_dimension(name, dim):
    assert alg(name).dim == dim


@pytest.mark.parametrize("name,order", sorted(WEYL.items()))
def test_weyl_group_order(name, order):
    assert len(alg(name).weyl_group) == order


@pytest.mark.parametrize("name", ["sl2", "gl2", "so5", "sp4", "sl3"])
def test_structure_constants_match_matrix_commutators(name):
    g = alg(name)
    for a, b in itertools.product(range(g.dim), repeat=2):
        comm = (g.basis[a] @ g.basis[b] - g.basis[b] @ g.basis[a]).astype(object)
        want = g.matrix_of(bracket(g, [int(i == a) for i in range(g.dim)], [int(i == b) for i in range(g.dim)]))
        assert np.array_equal(comm, want)


@pytest.mark.parametrize("name", ["so7", "sp6", "so8"])
def test_jacobi_sampled(name):
    g = alg(name)
    rng = random.Random(3)
    unit = lambda i: [Fraction(int(k == i)) for k in range(g.dim)]
    for _ in range(40):
        a, b, c = (unit(rng.randrange(g.dim)) for _ in range(3))
        total = [sum(x) for x in zip(bracket(g, a, bracket(g, b, c)), bracket(g, b, bracket(g, c, a)), bracket(g, c, bracket(g, a, b)))]
        assert not any(total)


@pytest.mark.parametrize("name", ["sl2", "so5", "sp6"])
def test_basis_entries_small(name):
    g = alg(name)
    assert max(int(np.abs(T).max()) for T in g.basis) <= 2


def test_weyl_average_is_invariant():
    g = alg("so5")
    r = g.cartan_rank
    f = {((2, 0) + (0,) * (3 * r - 2), ()): 1}
    avg = weyl_orbit_average(g, f)
    assert weyl_orbit_average(g, avg) == avg
