from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from currentcoh import classes, tracecoh
from currentcoh.classes import GravitonSpec, Label, TraceWord, parse_trace_word
from currentcoh.cochain import g_action
from currentcoh.liealg import LieAlgebraSpec, build_algebra
from currentcoh.superspace import AMonomial, Q_CHARGE, charges
from currentcoh.traceform import TraceForm, apply_Q, expand

SL2 = build_algebra(LieAlgebraSpec.parse("sl2"))
SO5 = build_algebra(LieAlgebraSpec.parse("so5"))

labels = st.tuples(
    st.integers(0, 2),
    st.integers(0, 2),
    st.lists(st.sampled_from([1, 2, 3]), unique=True, max_size=3).map(tuple),
).filter(lambda t: t[0] or t[1] or t[2]).map(lambda t: Label(*t))


words = st.lists(
    st.tuples(
        st.fractions(min_value=-20, max_value=20, max_denominator=6).filter(lambda x: x != 0),
        st.lists(st.lists(labels, min_size=1, max_size=4).map(tuple), min_size=1, max_size=3).map(tuple),
    ),
    min_size=1,
    max_size=4,
).map(lambda ts: TraceWord(tuple(ts)))


# --- text format ----------------------------------------------------------------


@pytest.mark.parametrize("name", sorted(classes.BUILTINS))
def test_builtins_round_trip(name):
    w = classes.builtin_representative(name)
    assert parse_trace_word(w.text()) == w


@settings(max_examples=80, deadline=None)
@given(words)
def test_random_words_round_trip(w):
    assert parse_trace_word(w.text()) == w


def test_parser_accepts_powers_and_comments():
    w = parse_trace_word("3/2 * Tr(t1 t2t3) * Tr(zp zm)^2  # note\n- Tr(t1 t1)")
    assert w.terms[0][0] == Fraction(3, 2) and len(w.terms[0][1]) == 3
    assert w.terms[1][0] == -1


@pytest.mark.parametrize("text", ["", "Tr()", "Tr(t4)", "Tr(t1t1)", "2 * Tr(x1)", "+"])
def test_parser_rejects(text):
    with pytest.raises(ValueError):
        parse_trace_word(text)


def test_label_letter_signs():
    assert Label.parse("t1t2").letter() == (-1, AMonomial(0, 0, 3))
    assert Label.parse("t2t1").letter() == (1, AMonomial(0, 0, 3))
    assert Label.parse("zp2").letter() == (2, AMonomial(2, 0, 0))
    assert Label.parse("t1t2t3").letter()[0] == -1


def test_builtin_sectors():
    assert classes.builtin_representative("XiF_sl2").sector() == (7, (0, 0, 4, 4, 4))
    assert classes.builtin_representative("XiF_so7").sector() == (8, (0, 0, 3, 3, 3))
    assert classes.builtin_representative("XiNC_so7").sector() == (8, (1, 1, 2, 2, 2))


def test_inhomogeneous_word_rejected():
    w = parse_trace_word("Tr(t1 t2) + Tr(t1 t2 t3)")
    with pytest.raises(ValueError):
        w.sector()
    with pytest.raises(ValueError):
        classes.verify_class(w, "sl2")


def test_charge_bookkeeping_between_so7_sectors():
    a = charges(*classes.builtin_representative("XiF_so7").sector())
    b = charges(*classes.builtin_representative("XiNC_so7").sector())
    assert (a - b).as_tuple() == tuple(-x for x in Q_CHARGE.as_tuple())
    assert b.deg - a.deg == 1


# --- gravitons ----------------------------------------------------------------------


def _specs_up_to(total):
    out = []
    for s in classes.graviton_specs(total, (total,) * 5):
        if sum(s.multidegree) <= total:
            out.append(s)
    return out


@pytest.mark.parametrize("g", [SL2, SO5], ids=["sl2", "so5"])
def test_single_gravitons_closed_exhaustive(g):
    count = 0
    for s in _specs_up_to(4):
        f = classes.graviton(s)
        if tracecoh.min_trace_length(g) > 1:
            f = f.drop_short_traces()
        if f:
            assert classes.is_closed(g, f)
            count += 1
    assert count > 50


def test_single_gravitons_closed_randomized_beyond():
    rng = random.Random(7)
    done = 0
    while done < 15:
        s = GravitonSpec(rng.randint(0, 2), rng.randint(0, 1), tuple(rng.randint(0, 2) for _ in range(3)), tuple(rng.randint(0, 1) for _ in range(3)), rng.randint(0, 1), rng.randint(0, 1))
        if s.word_length > 5 or sum(s.multidegree) - s.word_length > 3:
            continue
        done += 1
        f = classes.graviton(s).drop_short_traces()
        if f:
            assert classes.is_closed(SO5, f)


def test_multiset_construction_matches_direct_expansion():
    for s in _specs_up_to(4):
        a, b = classes.graviton(s), classes.graviton_direct(s)
        assert bool(a) == bool(b)
        if b:
            k = next(iter(b.terms))
            assert a == b.scale(Fraction(a.terms.get(k, 0)) / Fraction(b.terms[k]))


def test_graviton_expansion_is_invariant_and_closed_over_q():
    s = GravitonSpec(1, 0, (1, 1, 0), (0, 0, 1), 0, 0)
    c = expand(classes.graviton(s), SL2)
    assert c
    for a in range(SL2.dim):
        assert not g_action(a, c)
    assert classes.closed_exact_coordinates(SL2, classes.graviton(s))


def test_symtr_supersymmetric():
    # permuting SymTr arguments with the Koszul sign leaves it fixed
    fs = [("p",), (1,), ("m",), (2,)]
    base = classes.superfield_to_form(classes._symtr(fs))
    for perm in itertools.permutations(range(4)):
        odd = [i for i in perm if classes._factor_parity(fs[i])]
        sign = (-1) ** sum(1 for a in range(len(odd)) for b in range(a + 1, len(odd)) if odd[a] > odd[b])
        other = classes.superfield_to_form(classes._symtr([fs[i] for i in perm]))
        assert other == base.scale(sign)


def test_graviton_multidegree_and_length():
    s = GravitonSpec(2, 1, (1, 0, 2), (1, 0, 0), 1, 0)
    f = classes.graviton(s)
    assert f.sector() == (s.word_length, s.multidegree)


def test_graviton_spec_validation():
    with pytest.raises(ValueError):
        GravitonSpec(e=(2, 0, 0))
    with pytest.raises(ValueError):
        GravitonSpec(k_plus=2)


@pytest.mark.parametrize("p,n", [(2, (0, 0, 1, 1, 0)), (3, (0, 0, 2, 1, 1)), (4, (0, 0, 2, 1, 1)), (2, (1, 1, 0, 0, 1))])
def test_fortuitous_dim_bounds(p, n):
    h, span = classes.graviton_span_in_H("sl2", p, n)
    assert 0 <= span <= h
    assert classes.fortuitous_dim("sl2", p, n) == h - span


def test_fortuity_vanishes_at_low_levels():
    rows = classes.fortuitous_sweep("sl2", 8)
    assert rows and all(r["fortuitous_dim"] == 0 for r in rows)


def test_rank_stabilization_small():
    res = classes.rank_stabilization(3, (0, 0, 2, 1, 0))
    assert res["sl4"] == res["sl6"]


# --- class checks -----------------------------------------------------------------


def test_coboundary_is_exact():
    n = (0, 0, 2, 1, 1)
    basis = tracecoh.invariant_basis(SL2, 2, n, classes.exactla.DEFAULT_PRIMES[0])
    f = apply_Q(TraceForm({basis[0]: 1}) + TraceForm({basis[-1]: 3}))
    rep = classes.verify_class(f, "sl2", sector=(3, n))
    assert rep.closed and rep.exact and not rep.fortuitous


def test_zero_form_needs_sector():
    with pytest.raises(ValueError):
        classes.verify_class(TraceForm(), "sl2")
    rep = classes.verify_class(TraceForm(), "sl2", sector=(2, (0, 0, 1, 1, 0)))
    assert rep.closed and rep.exact


def test_graviton_class_is_nontrivial_and_not_fortuitous():
    rep = classes.verify_class(parse_trace_word("Tr(t1 t2)"), "sl2")
    assert rep.closed and rep.exact is False and rep.fortuitous is False
    assert rep.cartan_restriction_zero is False


def test_non_closed_single_term_detected():
    w = classes.builtin_representative("XiF_so7")
    assert not classes.is_closed("so7", TraceWord(w.terms[:1]).to_form())


def test_xif_so7_closed_and_coefficients_forced():
    w = classes.builtin_representative("XiF_so7")
    assert classes.is_closed("so7", w.to_form())
    rep = classes.closed_repair(w, "so7")
    assert rep.closed_as_given and rep.nullity == 1
    assert rep.coefficients == [1] * len(w.terms)


def test_closed_repair_recovers_perturbed_word():
    w = classes.builtin_representative("XiF_so7")
    c, tr = w.terms[3]
    bad = TraceWord(w.terms[:3] + ((c * 3, tr),) + w.terms[4:])
    assert not classes.is_closed("so7", bad.to_form())
    rep = classes.closed_repair(bad, "so7")
    assert not rep.closed_as_given and rep.word is not None
    assert classes.is_closed("so7", rep.word.to_form())


def test_xinc_restricts_to_zero_on_cartan():
    rep = classes.verify_class(classes.builtin_representative("XiNC_so7"), "so7", check_exact=False, check_fortuitous=False)
    assert rep.closed and rep.cartan_restriction_zero is True


def test_unsupported_algebra_rejected():
    with pytest.raises(ValueError):
        classes.verify_class(parse_trace_word("Tr(t1 t2)"), "so4")
