import itertools
import math

import pytest
from hypothesis import given, strategies as st

from oracles import downsets, functions, leq, lower
from triposforge.completions import (PointsPsi, PointwiseCompletion, SpanCompletion, compex_to_psi,
                                     existential_completion, forgetful, points, psi_to_compex, top_inclusion)
from triposforge.doctrine import WeakSubobjects, check_RC, existential_structure, localic, trivial, weak_subobjects
from triposforge.certificate import Certificate
from triposforge.fincat import Budget, FinCategory, FinSet, Fn, check_functor_laws
from triposforge.order import FinPoset, find_isomorphism

FS = FinSet((0, 1))
B = Budget()
CHAIN2 = FinPoset.chain(2)
BOOL4 = FinPoset.from_covers(["bot", "a", "b", "top"], [("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")])
VALUES = [CHAIN2, FinPoset.chain(3), BOOL4]


def fibre_poset(d, a):
    els = d.elements(a)
    return FinPoset(list(range(len(els))), [[d.leq(a, s, t) for t in els] for s in els])


@pytest.mark.parametrize("values", VALUES)
def test_points_object_count(values):
    g = points(localic(values, FS))
    assert len(g.objects(B)) == sum(len(values) ** len(a) for a in FS.objects(B))


def test_points_hom_is_predicate_respecting_arrows():
    p = localic(CHAIN2, FS)
    g = points(p)
    objs = g.objects(B)
    for x in objs:
        for y in objs:
            expected = [f for f in FS.hom(x.obj, y.obj)
                        if all(p.v.le[x.pred[i]][y.pred[f.idx[i]]] for i in range(len(x.obj)))]
            assert [h.arrow for h in g.hom(x, y)] == expected


def test_points_forgetful_and_top_inclusion_are_functors():
    g = points(localic(CHAIN2, FS))
    for f, objs in ((forgetful(g), g.objects(B)), (top_inclusion(g), FS.objects(B))):
        cert = Certificate("functor_laws")
        check_functor_laws(f, objs, cert)
        assert cert.ok


@pytest.mark.parametrize("values", VALUES)
def test_compex_fibre_is_downset_power(values):
    pe, _ = existential_completion(localic(values, FS), B)
    assert isinstance(pe, PointwiseCompletion)
    nd = len(downsets(values))
    for a in FS.objects(B):
        assert len(pe.elements(a)) == nd ** len(a)


@pytest.mark.parametrize("values", VALUES)
def test_compex_of_localic_is_localic_on_downsets(values):
    # the fibre over a point is D(V) itself
    pe, _ = existential_completion(localic(values, FS), B)
    ds = downsets(values)
    oracle = FinPoset(list(range(len(ds))), [[s <= t for t in ds] for s in ds])
    assert find_isomorphism(fibre_poset(pe, (0,)), oracle) is not None


def span_image_oracle(values, a, universe):
    """Downset tuples over a reached by spans (f: B → a, β) with B a subset of the universe."""
    vals = values.elems
    out = set()
    for r in range(len(universe) + 1):
        for b in itertools.combinations(universe, r):
            for f in functions(b, range(len(a))):
                for beta in functions(b, vals):
                    out.add(tuple(frozenset(z for z in vals if any(leq(values, z, v)
                                                                   for v, k in zip(beta, f) if k == j))
                                  for j in range(len(a))))
    return sorted(out, key=lambda t: [sorted(x) for x in t])


def tuple_poset(tuples):
    return FinPoset(list(range(len(tuples))), [[all(x <= y for x, y in zip(s, t)) for t in tuples] for s in tuples])


@pytest.mark.parametrize("values", [CHAIN2, BOOL4])
def test_span_reflection_against_span_image_oracle(values):
    p = localic(values, FS)
    sp = SpanCompletion(p, B)
    for a in FS.objects(B):
        oracle = tuple_poset(span_image_oracle(values, a, FS.universe))
        assert find_isomorphism(fibre_poset(sp, a), oracle) is not None


def test_pointwise_and_span_routes_agree_on_chains():
    p = localic(CHAIN2, FS)
    pw, sp = PointwiseCompletion(p), SpanCompletion(p, B)
    for a in FS.objects(B):
        assert find_isomorphism(fibre_poset(pw, a), fibre_poset(sp, a)) is not None


def test_span_reflection_is_truncated_by_the_universe():
    # ↓a ∪ ↓b at both points needs a four-element span domain
    pw, sp = PointwiseCompletion(localic(BOOL4, FS)), SpanCompletion(localic(BOOL4, FS), B)
    assert len(pw.elements((0, 1))) == 36 and len(sp.elements((0, 1))) == 27
    for a in ((), (0,), (1,)):
        assert find_isomorphism(fibre_poset(pw, a), fibre_poset(sp, a)) is not None


@given(st.data())
def test_classify_span_is_downset_of_image(data):
    p = localic(BOOL4, FS)
    pe = PointwiseCompletion(p)
    a = (0, 1)
    b = data.draw(st.sampled_from(FS.objects(B)))
    f = data.draw(st.sampled_from(FS.hom(b, a)))
    beta = data.draw(st.tuples(*[st.integers(0, 3)] * len(b)))
    got = pe.classify_span(a, f, beta)
    vals = BOOL4.elems
    for j in range(len(a)):
        image = [vals[i] for i, k in zip(beta, f.idx) if k == j]
        expected = {z for z in vals if any(leq(BOOL4, z, v) for v in image)}
        assert {vals[i] for i in range(4) if pe.mask(got[j]) >> i & 1} == expected


@given(st.data())
def test_unit_and_counit_inequalities(data):
    p = localic(BOOL4, FS)
    pe, cm = existential_completion(p, B)
    a = data.draw(st.sampled_from(FS.objects(B)))
    s = data.draw(st.sampled_from(pe.elements(a)))
    x = data.draw(st.sampled_from(p.elements(a)))
    assert pe.leq(a, s, pe.include(a, pe.counit(a, s)))
    assert pe.counit(a, pe.include(a, x)) == x


def test_canonical_morphisms_certified():
    for p in (localic(CHAIN2, FS), trivial(FinCategory.from_poset(CHAIN2, "chain2cat"))):
        _, cm = existential_completion(p, B)
        assert cm.certificate.ok and cm.counit is not None


def test_compex_of_trivial_is_weak_subobjects():
    c = FinCategory.from_poset(FinPoset.chain(3), "chain3cat")
    pe, _ = existential_completion(trivial(c), B)
    psi = weak_subobjects(c, B)
    for a in c.objs:
        assert find_isomorphism(fibre_poset(pe, a), fibre_poset(psi, a)) is not None


@pytest.mark.parametrize("values", [CHAIN2, FinPoset.chain(3)])
def test_completion_is_existential_with_choice(values):
    pe, _ = existential_completion(localic(values, FS), B)
    assert existential_structure(pe, "all", B)[1].ok
    assert check_RC(pe, B).ok


def test_points_psi_matches_generic_weak_subobjects():
    g = points(localic(CHAIN2, FS))
    fast, slow = PointsPsi(g), WeakSubobjects(g, B)
    for x in g.objects(B):
        assert find_isomorphism(fibre_poset(fast, x), fibre_poset(slow, x)) is not None


@pytest.mark.parametrize("values", VALUES)
def test_points_psi_fibre_sizes(values):
    g = points(localic(values, FS))
    psi = PointsPsi(g)
    for x in g.objects(B)[:20]:
        expected = math.prod(len(downsets(values.sub(lower(values, [values.elems[i]])))) for i in x.pred)
        assert len(psi.elements(x)) == expected


def test_compex_psi_fibre_iso_round_trip():
    p = localic(BOOL4, FS)
    pe, _ = existential_completion(p, B)
    g = points(p)
    psi = PointsPsi(g)
    for a in FS.objects(B):
        image = set()
        for s in pe.elements(a):
            w = compex_to_psi(pe, psi, a, s)
            assert psi_to_compex(pe, psi, a, w) == s
            image.add(w)
        assert image == set(psi.elements(g.top_point(a)))


def test_span_completion_fn_arrow_classification():
    # over FinSet the span (0,1) → (0,) collapses both points: image is the join of values
    p = localic(CHAIN2, FS)
    sp = SpanCompletion(p, B)
    f = Fn((0, 1), (0,), [0, 0])
    assert sp.classify((0,), f, (0, 1)) == sp.classify((0,), FS.identity((0,)), (1,))
