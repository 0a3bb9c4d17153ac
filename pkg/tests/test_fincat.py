import itertools
import math

import pytest
from hypothesis import given

from oracles import posets
from triposforge.certificate import ABSENT, EXHAUSTED, FAIL
from triposforge.fincat import (Budget, BudgetExhausted, CategoryError, FinCategory, FinSet, Fn, Functor, Slice,
                                certify_equalizer, certify_product, certify_pullback, certify_terminal,
                                check_weakly_terminal, equivalence_check, generic_proof_search, identity_functor,
                                slice_generic_proof, terminal_category, wdp_competitors, weak_dependent_product)
from triposforge.certificate import Certificate
from triposforge.order import FinPoset, HeytingAlgebra

FS = FinSet((0, 1))
B = Budget()


def test_finset_objects_and_homs():
    objs = FS.objects(B)
    assert objs == ((), (0,), (1,), (0, 1))
    assert len(FS.hom((0, 1), (0, 1))) == 2 ** 2


def test_finset_budget_exhaustion():
    with pytest.raises(BudgetExhausted):
        FinSet(range(4)).objects(Budget(max_objects=3, max_set_size=4))


def test_finset_rejects_empty_universe():
    with pytest.raises(ValueError):
        FinSet(())


def test_product_certified():
    p, p1, p2 = FS.product((0, 1), (0, 1))
    assert len(p) == 4
    assert certify_product(FS, (0, 1), (0, 1), B).ok


def test_pullback_of_equal_constants_is_product():
    a, b, c = (0, 1), (0, 1), (0,)
    f = Fn(a, c, [0, 0])
    g = Fn(b, c, [0, 0])
    p, _, _ = FS.pullback(f, g)
    oracle = [(x, y) for x in a for y in b if f.idx[a.index(x)] == g.idx[b.index(y)]]
    assert sorted(p) == sorted(oracle) == sorted(itertools.product(a, b))
    assert certify_pullback(FS, f, g, B).ok


@pytest.mark.parametrize("fi, gi", [([0, 1], [1, 1]), ([0, 0], [1, 0]), ([1, 0], [0, 1])])
def test_pullback_against_subset_oracle(fi, gi):
    a = (0, 1)
    f, g = Fn(a, a, fi), Fn(a, a, gi)
    p, _, _ = FS.pullback(f, g)
    oracle = [(x, y) for x in a for y in a if fi[x] == gi[y]]
    assert sorted(p) == oracle
    assert certify_pullback(FS, f, g, B).ok


def test_terminal_and_equalizer_certified():
    assert certify_terminal(FS, B).ok
    f = Fn((0, 1), (0, 1), [0, 1])
    g = Fn((0, 1), (0, 1), [0, 0])
    e, _ = FS.equalizer(f, g)
    assert e == (0,)
    assert certify_equalizer(FS, f, g, B).ok


def test_fin_category_rejects_missing_composite():
    with pytest.raises(CategoryError):
        FinCategory(["a", "b", "c"], [("ia", "a", "a"), ("ib", "b", "b"), ("ic", "c", "c"), ("f", "a", "b"),
                                      ("g", "b", "c")], {}, {"a": "ia", "b": "ib", "c": "ic"})


def test_fin_category_json_round_trip():
    c = FinCategory.from_poset(FinPoset.chain(3), "c3")
    assert FinCategory.from_json(c.to_json(), "c3") == c


@given(posets(4))
def test_poset_categories_satisfy_laws(p):
    c = FinCategory.from_poset(p, "p")
    for f in c.arrow_ids:
        assert c.compose(f, c.identity(c.dom(f))) == f
        assert c.compose(c.identity(c.cod(f)), f) == f
    for f, g, h in itertools.product(c.arrow_ids, repeat=3):
        if c.cod(f) == c.dom(g) and c.cod(g) == c.dom(h):
            assert c.compose(h, c.compose(g, f)) == c.compose(c.compose(h, g), f)


def test_slice_of_terminal_category_is_itself():
    c = terminal_category()
    s = Slice(c, "*")
    objs = s.objects(B)
    assert len(objs) == 1
    assert len(s.hom(objs[0], objs[0])) == 1


def test_slice_over_point_equivalent_to_finset():
    one = (0,)
    s = Slice(FS, one)
    f = Functor(s, FS, lambda a: a.dom, lambda u: u.arrow, name="dom")

    def eso(y):
        x = FS.to_terminal(y)
        i = FS.identity(y)
        return x, i, i

    cert = equivalence_check(f, B, cod_objects=FS.objects(B), eso=eso, laws=True)
    assert cert.ok and "equivalence at budget" in cert.witnesses


def test_slice_generic_proof_from_base():
    theta, cert = generic_proof_search(FS, B)
    assert cert.ok
    s = Slice(FS, (0,))
    st = slice_generic_proof(s, theta)
    found, scert = generic_proof_search(s, B, candidates=[st])
    assert scert.ok and found == st


def test_identity_functor_is_equivalence():
    c = FinCategory.from_poset(FinPoset.chain(2), "c2")
    cert = equivalence_check(identity_functor(c), B, laws=True)
    assert cert.ok


def test_non_full_inclusion_reports_pair():
    discrete = FinCategory(["c0", "c1"], [("i0", "c0", "c0"), ("i1", "c1", "c1")], {}, {"c0": "i0", "c1": "i1"})
    c = FinCategory.from_poset(FinPoset.chain(2), "c2")
    inc = Functor(discrete, c, lambda o: o, lambda a: c.identity(discrete.dom(a)), name="inc")
    cert = equivalence_check(inc, B)
    assert cert.verdict == FAIL
    assert cert.checks["full"] == 0 and cert.checks["faithful"] == 1
    assert cert.counterexample["not_full"] == {"dom": "c0", "cod": "c1", "missing": "c0<=c1"}


def test_wdp_of_identities():
    a = (0, 1)
    i = FS.identity(a)
    d, cert = weak_dependent_product(FS, i, i, B)
    assert cert.ok
    assert len(d.z) == len(a)


@pytest.mark.parametrize("x, j, i, fi, gi", [
    ((0, 1), (0, 1), (0,), [0, 1], [0, 0]),
    ((0, 1), (0, 1), (0, 1), [0, 0], [0, 1]),
    ((0, 1), (0,), (0, 1), [0, 0], [1]),
])
def test_finset_wdp_is_section_set(x, j, i, fi, gi):
    f, g = Fn(x, j, fi), Fn(j, i, gi)
    d, cert = weak_dependent_product(FS, f, g, B)
    assert cert.ok
    # |Z| = Σ_i Π_{j over i} |f⁻¹(j)|
    expected = sum(
        math.prod(sum(1 for v in fi if v == jj) for jj in range(len(j)) if gi[jj] == ii)
        for ii in range(len(i)))
    assert len(d.z) == expected
    comp = wdp_competitors(FS, f, g, B)
    assert check_weakly_terminal(FS, d, comp, Certificate("wt"))


def test_wdp_budget_exhaustion_is_a_verdict():
    f = FS.identity((0, 1))
    _, cert = weak_dependent_product(FS, f, f, Budget(max_competitors=1))
    assert cert.verdict == EXHAUSTED


@pytest.mark.parametrize("x, j, i", [("a", "top", "top"), ("bot", "a", "top"), ("a", "a", "top"), ("bot", "b", "b")])
def test_poset_wdp_is_implication(x, j, i):
    p = FinPoset.from_covers(["bot", "a", "b", "top"], [("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")])
    h = HeytingAlgebra.from_poset(p)
    c = FinCategory.from_poset(p, "bool4")
    (f,) = c.hom(x, j)
    (g,) = c.hom(j, i)
    d, cert = weak_dependent_product(c, f, g, B)
    assert cert.ok
    assert d.z == h.meet(i, h.impl(j, x))


def test_generic_proof_trivial_category():
    c = terminal_category()
    theta, cert = generic_proof_search(c, B)
    assert cert.ok and theta == c.identity("*")


def test_generic_proof_finset():
    theta, cert = generic_proof_search(FS, B)
    assert cert.ok
    assert cert.checks["arrows"] == sum(len(FS.hom(a, b)) for a in FS.objects(B) for b in FS.objects(B))


def test_generic_proof_absent_in_discrete_category():
    # no Λ receives arrows from both objects, so id_a and id_b cannot both be classified
    c = FinCategory(["a", "b"], [("ia", "a", "a"), ("ib", "b", "b")], {}, {"a": "ia", "b": "ib"})
    theta, cert = generic_proof_search(c, B)
    assert theta is None and cert.verdict == ABSENT
