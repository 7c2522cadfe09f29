from __future__ import annotations

import pytest

from currentcoh import engine, schemes
from currentcoh.traceform import TraceForm


@pytest.mark.parametrize("n", [(0, 0, 1, 1, 0), (0, 0, 2, 1, 0), (1, 1, 0, 0, 0), (1, 0, 1, 1, 0), (0, 0, 1, 1, 1)])
def test_coordinate_and_trace_routes_agree_on_sl2(n):
    a = schemes.invariants_supercommuting("sl2", n).dim
    b = schemes.invariants_supercommuting_coordinates("sl2", n).dim
    assert a == b == engine.dim_H("sl2", sum(n), n).dim_H


@pytest.mark.parametrize("n", [(0, 0, 1, 1, 1), (1, 1, 1, 0, 0), (0, 0, 2, 1, 0)])
def test_so5_top_degree(n):
    assert schemes.invariants_supercommuting("so5", n).dim == engine.dim_H("so5", sum(n), n).dim_H


def test_cartan_invariants_small():
    assert schemes.cartan_invariants("sl2", (0, 0, 1, 1, 0)).dim == 1
    assert schemes.cartan_invariants("sl2", (0, 0, 1, 0, 0)).dim == 0


def test_restriction_kernel_report_keys():
    rep = schemes.non_cartan_kernel("sl2", (0, 0, 1, 1, 0)).to_json()
    assert set(rep) == {"g", "n", "dim_scheme_invariants", "dim_cartan_invariants", "rank_restriction", "dim_kernel"}
    assert rep["dim_kernel"] == 0


def test_restriction_kills_relations():
    prods = [((schemes.X[0], schemes.X[1], schemes.X[2]),)]
    for rel in schemes.relation_forms(prods):
        assert not schemes.restrict_form("sl2", rel)


def test_restriction_of_quadratic_trace_is_nonzero():
    f = TraceForm.from_product([(schemes.X[0], schemes.X[1])])
    assert schemes.restrict_form("so5", f)


def test_content_of_maps_degrees_to_first_derivatives():
    content = dict(schemes.content_of((1, 0, 2, 0, 1)))
    assert content == {schemes.PSI_P: 1, schemes.X[0]: 2, schemes.X[2]: 1}
