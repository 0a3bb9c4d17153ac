import pytest
from hypothesis import given, strategies as st

from oracles import join
from triposforge.certificate import ABSENT, FAIL
from triposforge.completions import existential_completion
from triposforge.doctrine import (DoctrineError, ExplicitDoctrine, check_CA, check_RC, classifier_search,
                                  equality_predicate, existential_structure, hyperdoctrine_check, localic,
                                  power_object_search, slice_doctrine, trivial, validate_doctrine, weak_subobjects)
from triposforge.fincat import Budget, FinCategory, FinSet
from triposforge.order import FinPoset

FS = FinSet((0, 1))
B = Budget()
CHAIN2 = FinPoset.chain(2)
BOOL4 = FinPoset.from_covers(["bot", "a", "b", "top"], [("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")])


def chain2cat():
    return FinCategory.from_poset(CHAIN2, "chain2cat")


def test_trivial_passes_validation():
    for c in (FS, chain2cat()):
        assert validate_doctrine(trivial(c), B).ok


@pytest.mark.parametrize("values", [CHAIN2, FinPoset.chain(3), BOOL4])
def test_localic_passes_validation(values):
    assert validate_doctrine(localic(values, FS), B).ok


def test_corrupted_reindex_reports_composable_pair():
    c = FinCategory.from_poset(FinPoset.chain(3), "chain3cat")
    ident = {"c0": "c0", "c1": "c1"}
    tables = {f: dict(ident) for f in c.arrow_ids}
    tables["c0<=c2"] = {"c0": "c1", "c1": "c1"}
    p = ExplicitDoctrine(c, {o: CHAIN2 for o in c.objs}, tables, name="corrupt")
    cert = validate_doctrine(p, B)
    assert cert.verdict == FAIL
    assert cert.counterexample["composable_pair"] == ["c0<=c1", "c1<=c2"]


def test_explicit_rejects_non_monotone_table_shape():
    c = chain2cat()
    with pytest.raises(DoctrineError):
        ExplicitDoctrine(c, {o: CHAIN2 for o in c.objs}, {}, name="missing")


@given(st.sampled_from([(a, b) for a in FS.objects(B) for b in FS.objects(B)]), st.data())
def test_localic_exists_is_pointwise_join(ab, data):
    a, b = ab
    p = localic(BOOL4, FS)
    fs = FS.hom(a, b)
    if not fs:
        return
    f = data.draw(st.sampled_from(fs))
    alpha = data.draw(st.sampled_from(p.elements(a)))
    vals = BOOL4.elems
    expected = []
    for j in range(len(b)):
        acc = "bot"
        for i, k in zip(alpha, f.idx):
            if k == j:
                acc = join(BOOL4, acc, vals[i])
        expected.append(acc)
    assert p.label(b, p.exists(f, alpha)) == expected


def test_existential_structure_localic_and_trivial():
    for p in (localic(CHAIN2, FS), trivial(FS), trivial(chain2cat())):
        tables, cert = existential_structure(p, "all", B)
        assert cert.ok


def test_trivial_adjoints_are_unique_map():
    p = trivial(chain2cat())
    tables, _ = existential_structure(p, "all", B)
    for f, t in tables.left.items():
        assert list(t.items()) == [("T", "T")]


def test_weak_subobjects_exists_is_post_composition():
    c = FinCategory.from_poset(FinPoset.chain(3), "chain3cat")
    psi = weak_subobjects(c, B)
    for f in c.arrow_ids:
        a, b = c.dom(f), c.cod(f)
        for x in psi.elements(a):
            composite = c.compose(f, x)
            got = psi.exists(f, x)
            # got is the class of f∘x: they factor through each other over b
            assert c.cod(got) == b
            fac1 = [h for h in c.hom(c.dom(composite), c.dom(got)) if c.compose(got, h) == composite]
            fac2 = [h for h in c.hom(c.dom(got), c.dom(composite)) if c.compose(composite, h) == got]
            assert fac1 and fac2


def test_hyperdoctrine_localic_and_trivial():
    assert hyperdoctrine_check(localic(BOOL4, FS), B).ok
    assert hyperdoctrine_check(trivial(chain2cat()), B).ok


def test_hyperdoctrine_fails_on_m3_fibre():
    m3 = FinPoset.from_covers(["bot", "a", "b", "c", "top"],
                              [("bot", x) for x in "abc"] + [(x, "top") for x in "abc"])
    c = FinCategory.from_poset(FinPoset(["*"], [[True]]), "C1")
    p = ExplicitDoctrine(c, {"*": m3}, {"*<=*": {x: x for x in m3.elems}}, name="m3")
    cert = hyperdoctrine_check(p, B)
    assert cert.verdict == FAIL
    assert cert.subs[0].property == "heyting_fibres" and not cert.subs[0].ok


def test_equality_predicate_localic():
    p = localic(CHAIN2, FS)
    x = (0, 1)
    xx = FS.product(x, x)[0]
    d = p.label(xx, equality_predicate(p, x))
    assert d == ["c1" if u == v else "c0" for u, v in xx]
    assert p.label(FS.product((0,), (0,))[0], equality_predicate(p, (0,))) == ["c1"]


def test_equality_predicate_weak_subobjects_finset():
    psi = weak_subobjects(FS, B)
    x = (0, 1)
    xx = FS.product(x, x)[0]
    assert psi.label(xx, equality_predicate(psi, x)) == ["inhabited" if u == v else "empty" for u, v in xx]


def test_localic_classifier_is_value_set():
    p = localic(CHAIN2, FS)
    w, cert = classifier_search(p, B)
    assert cert.ok
    assert w.omega == ("c0", "c1") and w.member == (0, 1)


def test_trivial_classifier_is_terminal():
    c = chain2cat()
    p = trivial(c)
    w, cert = classifier_search(p, B)
    assert cert.ok
    assert w.omega == c.terminal() and w.member == "T"


def test_weak_subobjects_of_terminal_category_is_trivial():
    c = FinCategory.from_poset(FinPoset(["*"], [[True]]), "C1")
    psi = weak_subobjects(c, B)
    assert len(psi.elements("*")) == 1


def test_localic_fibre_size():
    assert len(localic(CHAIN2, FS).elements((0, 1))) == 4


def test_slice_classifier_is_projection():
    p = localic(CHAIN2, FS)
    x = (0, 1)
    s = slice_doctrine(p, x, B)
    w, cert = classifier_search(s, B)
    assert cert.ok
    om = ("c0", "c1")
    prod, p_om, p_x = FS.product(om, x)
    assert w.omega == p_x
    assert w.member == p.reindex(p_om, (0, 1))


def test_rc_on_weak_subobjects_and_completion():
    assert check_RC(weak_subobjects(chain2cat(), B), B).ok
    for p in (localic(CHAIN2, FS), trivial(chain2cat())):
        pe, _ = existential_completion(p, B)
        assert check_RC(pe, B).ok


def test_rc_fails_on_trivial_square():
    # with all predicates ⊤, choice needs an arrow A → B for every A, B; 01 and 10 are incomparable
    sq = FinPoset.from_covers(["00", "01", "10", "11"], [("00", "01"), ("00", "10"), ("01", "11"), ("10", "11")])
    c = FinCategory.from_poset(sq, "square")
    cert = check_RC(trivial(c), B)
    assert cert.verdict == FAIL
    a, b = cert.counterexample["A"], cert.counterexample["B"]
    assert not c.hom(a, b)


def test_ca_localic_and_trivial():
    cert, ws = check_CA(localic(CHAIN2, FS), B)
    assert cert.ok and ws and all(w.recovers_alpha for w in ws)
    c = FinCategory.from_poset(FinPoset(["*"], [[True]]), "C1")
    assert check_CA(trivial(c), B)[0].ok


def test_ca_fails_with_shrunk_power_object():
    p = localic(CHAIN2, FS)
    powers, pc = power_object_search(p, B)
    assert pc.ok
    x = (0, 1)
    pw = powers[x]
    # keep only the first element of PX: names for most predicates disappear
    keep = pw.px[:1]
    xk = FS.product(x, keep)[0]
    full = FS.product(x, pw.px)[0]
    member = tuple(pw.member[full.index(z)] for z in xk)
    shrunk = dict(powers)
    shrunk[x] = type(pw)(x, keep, member)
    cert, _ = check_CA(p, B, powers=shrunk)
    assert cert.verdict == FAIL


def test_classifier_absent_is_a_verdict():
    # a bare antichain of fibres with no arrows between objects admits no classifier
    c = FinCategory(["a", "b"], [("ia", "a", "a"), ("ib", "b", "b")], {}, {"a": "ia", "b": "ib"})
    p = ExplicitDoctrine(c, {"a": CHAIN2, "b": CHAIN2}, {"ia": {"c0": "c0", "c1": "c1"},
                                                       "ib": {"c0": "c0", "c1": "c1"}}, name="disc")
    w, cert = classifier_search(p, B)
    assert w is None and cert.verdict == ABSENT
