import pytest
from hypothesis import assume, given

from oracles import downsets, implication, join, leq, meet, posets, posets_with_top, supercompact
from triposforge.order import (FiniteFrame, FinPoset, HeytingAlgebra, MeetSemilattice, MonotoneMap, OrderError,
                               PreorderPresentation, detect_structure, downset_completion, downset_completion_check,
                               find_isomorphism, monotone_adjoints, poset_reflection, supercompact_elements)


def boolean4():
    return FinPoset.from_covers(["bot", "a", "b", "top"], [("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")])


def m3():
    return FinPoset.from_covers(["bot", "a", "b", "c", "top"],
                                [("bot", x) for x in "abc"] + [(x, "top") for x in "abc"])


@pytest.mark.parametrize("table, fragment", [
    ([[False, True], [False, True]], "reflexive"),
    ([[True, True], [True, True]], "antisymmetric"),
    ([[True, True, False], [False, True, True], [False, False, True]], "transitive"),
])
def test_poset_validation(table, fragment):
    with pytest.raises(OrderError, match=fragment):
        FinPoset(["x", "y", "z"][:len(table)], table)


def test_duplicate_ids_rejected():
    with pytest.raises(OrderError, match="distinct"):
        FinPoset(["x", "x"], [[True, False], [False, True]])


def test_json_round_trip():
    p = boolean4()
    assert FinPoset.from_json(p.to_json()) == p


def test_reflection_collapses_symmetric_pair():
    p, q = poset_reflection(PreorderPresentation(("a", "b"), ((True, True), (True, True))))
    assert len(p) == 1
    assert q == {"a": "a", "b": "a"}


def test_reflection_of_discrete_is_identity():
    n = 3
    p, q = poset_reflection(PreorderPresentation.from_function("xyz", lambda a, b: a == b))
    assert len(p) == n and q == {x: x for x in "xyz"}
    assert all(not p.le(a, b) for a in p.elems for b in p.elems if a != b)


@given(posets(5))
def test_reflection_matches_mutual_leq_partition(p):
    # a preorder whose classes are pairs of copies of each element
    elems = [(x, k) for x in p.elems for k in (0, 1)]
    pre = PreorderPresentation.from_function(elems, lambda a, b: leq(p, a[0], b[0]))
    refl, q = poset_reflection(pre)
    assert len(refl) == len(p)
    for a in elems:
        for b in elems:
            same = leq(p, a[0], b[0]) and leq(p, b[0], a[0])
            assert (q[a] == q[b]) == same


def test_detect_chain2():
    rep = detect_structure(FinPoset.chain(2))
    assert all(rep.flags().values())


def test_detect_boolean4():
    rep = detect_structure(boolean4())
    assert rep.distributive and rep.heyting and rep.frame


def test_detect_m3_reports_counterexample():
    rep = detect_structure(m3())
    assert not rep.distributive
    x, y, z = rep.witnesses["distributivity_counterexample"][:3]
    p = m3()
    assert meet(p, x, join(p, y, z)) != join(p, meet(p, x, y), meet(p, x, z))


@given(posets(5))
def test_detect_structure_against_oracle(p):
    rep = detect_structure(p)
    pairs = [(x, y) for x in p.elems for y in p.elems]
    assert rep.has_meets == all(meet(p, x, y) is not None for x, y in pairs)
    assert rep.has_joins == all(join(p, x, y) is not None for x, y in pairs)
    if rep.has_meets and rep.has_joins:
        dist = all(meet(p, x, join(p, y, z)) == join(p, meet(p, x, y), meet(p, x, z))
                   for x in p.elems for y in p.elems for z in p.elems)
        assert rep.distributive == dist


@given(posets_with_top(4))
def test_heyting_implication_against_oracle(p):
    try:
        h = HeytingAlgebra.from_poset(p)
    except OrderError:
        assume(False)
    for b in p.elems:
        for c in p.elems:
            assert h.impl(b, c) == implication(p, b, c)
            for a in p.elems:
                assert h.le(h.meet(a, b), c) == h.le(a, h.impl(b, c))


@pytest.mark.parametrize("poset, expected_size", [
    (FinPoset(["t"], [[True]]), 2),
    (FinPoset.chain(2), 3),
    (FinPoset.from_covers(["ab", "a", "b", "t"], [("ab", "a"), ("ab", "b"), ("a", "t"), ("b", "t")]), 6),
])
def test_downset_completion_sizes(poset, expected_size):
    frame, emb = downset_completion(MeetSemilattice.from_poset(poset))
    assert len(frame) == expected_size == len(downsets(poset))


def test_downset_completion_of_chain2_is_chain3():
    frame, _ = downset_completion(MeetSemilattice.from_poset(FinPoset.chain(2)))
    assert find_isomorphism(frame.poset, FinPoset.chain(3)) is not None


@given(posets_with_top(4))
def test_downset_completion_properties(p):
    try:
        s = MeetSemilattice.from_poset(p)
    except OrderError:
        assume(False)
    frame, emb = downset_completion(s)
    assert set(frame.elems) == set(downsets(p))
    sc = supercompact_elements(frame)
    assert set(sc.carrier) == {emb(x) for x in p.elems}
    assert sc.closed_under_meets and sc.join_generating
    assert downset_completion_check(s).ok


def test_supercompact_chain3():
    sc = supercompact_elements(FiniteFrame(MeetSemilattice.from_poset(FinPoset.chain(3))))
    assert sc.carrier == ("c1", "c2")
    assert sc.supercoherent


def test_supercompact_two_element_frame():
    sc = supercompact_elements(FiniteFrame(MeetSemilattice.from_poset(FinPoset.chain(2))))
    assert sc.carrier == ("c1",)


@given(posets_with_top(4))
def test_supercompact_against_oracle(p):
    try:
        h = HeytingAlgebra.from_poset(p)
    except OrderError:
        assume(False)
    assert list(supercompact_elements(h).carrier) == supercompact(p)


def test_frame_rejects_m3():
    # M3 already lacks implications, so construction fails before the distributivity test
    with pytest.raises(OrderError):
        FiniteFrame(MeetSemilattice.from_poset(m3()))


def test_adjoints_of_identity():
    p = boolean4()
    i = MonotoneMap.identity(p)
    assert monotone_adjoints(i) == (i, i)


def test_adjoints_of_constant_top():
    # the least b with a ≤ ⊤ is ⊥; no right adjoint since f(b) ≤ ⊥ never holds
    p = FinPoset.chain(2)
    f = MonotoneMap(p, p, {"c0": "c1", "c1": "c1"})
    left, right = monotone_adjoints(f)
    assert left.table == {"c0": "c0", "c1": "c0"}
    assert right is None


def test_meet_with_a_has_implication_as_right_adjoint():
    p = boolean4()
    h = HeytingAlgebra.from_poset(p)
    f = MonotoneMap(p, p, {x: h.meet("a", x) for x in p.elems})
    _, right = monotone_adjoints(f)
    assert right.table == {x: h.impl("a", x) for x in p.elems}
    assert right.table == {x: detect_structure(p).witnesses["impl"][("a", x)] for x in p.elems}


@given(posets(4), posets(3))
def test_adjoints_against_oracle(p, q):
    # all monotone maps p → q are too many; take a sample via a fixed rule
    elems = q.elems
    cand = {x: elems[min(len(elems) - 1, sum(leq(p, y, x) for y in p.elems) - 1)] for x in p.elems}
    try:
        f = MonotoneMap(p, q, cand)
    except OrderError:
        assume(False)
    left, right = monotone_adjoints(f)
    exists_left = all(
        any(all(leq(q, a, f(b)) == leq(p, l, b) for b in p.elems) for l in p.elems) for a in q.elems)
    exists_right = all(
        any(all(leq(q, f(b), a) == leq(p, b, r) for b in p.elems) for r in p.elems) for a in q.elems)
    assert (left is not None) == exists_left
    assert (right is not None) == exists_right


def test_downset_completion_check_certificate():
    cert = downset_completion_check(MeetSemilattice.from_poset(FinPoset.chain(2)), "chain2")
    assert cert.ok
    w = cert.witnesses[0]
    assert w["closed_under_meets"] and w["join_generating"] and w["embedding_is_iso"]
