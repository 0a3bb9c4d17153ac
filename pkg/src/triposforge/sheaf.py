"""The embedding T_P ↪ T_{P^∃}, its closure operator on subobjects, and sheaves for it."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .certificate import ABSENT, EXHAUSTED, Certificate
from .completions import existential_completion
from .doctrine import Doctrine, check_morphism
from .fincat import DEFAULT_BUDGET, Budget, BudgetExhausted, Functor
from .relational import (IdentityBaseAdjunction, Rel, RelObj, TCategory, ToposAdjunction, fibrewise_adjunction,
                         topos_adjunction_check)


class SheafError(ValueError):
    """Raised when a predicate is not a subobject of the given object."""


@dataclass
class Embedding:
    """L ⊣ Δ : T_P ↪ T_{P^∃} induced by 𝔦̄ ⊣ 𝔦."""

    p: Doctrine
    pe: Doctrine
    adj: IdentityBaseAdjunction
    ta: ToposAdjunction

    @property
    def presheaves(self) -> TCategory:
        return self.ta.tr

    @property
    def sheaves(self) -> TCategory:
        return self.ta.tq


def embed(p: Doctrine, b: Budget = DEFAULT_BUDGET):
    """Build the embedding and certify it: 𝔦̄ preserves ⊤ and ∧, 𝔦̄ ⊣ 𝔦 with 𝔦̄𝔦 = id, and L ⊣ Δ on T."""
    pe, cm = existential_completion(p, b)
    if cm.counit is None:
        raise SheafError(f"{p.name} is not full existential; no counit P^∃ → P")
    adj = IdentityBaseAdjunction(pe, p, pe.counit, pe.include, name=f"embedding({p.name})")
    tr = TCategory(pe, b)
    tq = TCategory(p, b)
    ta = ToposAdjunction(adj, tr, tq, b=b)
    cert = Certificate("geometric_embedding", p.name, b.to_json())
    cert.add(check_morphism(adj.left_morphism, b))
    cert.add(fibrewise_adjunction(adj, b))
    cert.add(topos_adjunction_check(ta, b, instance=adj.name))
    return Embedding(p, pe, adj, ta), cert.done()


# ---------------------------------------------------------------------------
# subobjects as strict extensional predicates


def is_subobject_predicate(t: TCategory, e: RelObj, sigma) -> bool:
    """σ ≤ E and σ(a) ∧ ρ(a, b) ≤ σ(b)."""
    p = t.doctrine
    a = e.obj
    if not p.leq(a, sigma, t.support(e)):
        return False
    aa, p1, p2 = t.s.two(a, a)
    return p.leq(aa, p.meet(aa, p.reindex(p1, sigma), e.pred), p.reindex(p2, sigma))


def subobject_predicates(t: TCategory, e: RelObj) -> tuple:
    p = t.doctrine
    return tuple(s for s in p.elements_below(e.obj, t.support(e)) if is_subobject_predicate(t, e, s))


def inclusion(t: TCategory, e: RelObj, sigma) -> Rel:
    """m_σ : (A, ρ ∧ σπ1) ↣ (A, ρ) with relation ρ(a, b) ∧ σ(a)."""
    if not is_subobject_predicate(t, e, sigma):
        raise SheafError("not a strict extensional predicate")
    p = t.doctrine
    aa, p1, _ = t.s.two(e.obj, e.obj)
    rho = p.meet(aa, e.pred, p.reindex(p1, sigma))
    m = RelObj(e.obj, rho)
    return Rel(m, e, rho)


def image_predicate(t: TCategory, m: Rel):
    """τ(a) = ∃d m(d, a)."""
    _, _, q2 = t.s.two(m.dom.obj, m.cod.obj)
    return t.doctrine.exists(q2, m.phi)


def pullback_predicate(t: TCategory, f: Rel, sigma):
    """(f*σ)(x) = ∃y (f(x, y) ∧ σ(y))."""
    p = t.doctrine
    xy, q1, q2 = t.s.two(f.dom.obj, f.cod.obj)
    return p.exists(q1, p.meet(xy, f.phi, p.reindex(q2, sigma)))


def is_mono(t: TCategory, m: Rel) -> bool:
    return t.compose(t.converse(m), m) == t.identity(m.dom)


def subobjects_of(t: TCategory, e: RelObj, b: Budget = DEFAULT_BUDGET, *, cross_check: bool = True):
    """Sub(E) as predicates, cross-checked against monos from enumerated objects.

    Every predicate's inclusion is admitted and monic with image σ; every
    enumerated mono into E has a subobject predicate as image and factors
    through that inclusion both ways.
    """
    cert = Certificate("subobjects", t.label(e).__repr__(), b.to_json())
    preds = subobject_predicates(t, e)
    cert.checks["predicates"] = len(preds)
    p = t.doctrine
    for s in preds:
        m = inclusion(t, e, s)
        if t.violation(m.dom, e, m.phi, check_bound=True) is not None or not is_mono(t, m):
            return preds, cert.fail({"inclusion_not_mono": p.label(e.obj, s)}).done()
        if not p.eq(e.obj, image_predicate(t, m), s):
            return preds, cert.fail({"image_mismatch": p.label(e.obj, s)}).done()
    if cross_check:
        try:
            objs = t.objects(b)
        except BudgetExhausted as exc:
            return preds, cert.fail(str(exc), EXHAUSTED).done()
        for d in objs:
            for m in t.hom(d, e):
                if not is_mono(t, m):
                    continue
                cert.count("monos")
                s = image_predicate(t, m)
                if s not in preds:
                    return preds, cert.fail({"mono_image_not_subobject": t.label(m)}).done()
                inc = inclusion(t, e, s)
                there = any(t.compose(inc, u) == m for u in t.hom(d, inc.dom))
                back = any(t.compose(m, u) == inc for u in t.hom(inc.dom, d))
                if not (there and back):
                    return preds, cert.fail({"mono_not_iso_to_inclusion": t.label(m)}).done()
    return preds, cert.done()


# ---------------------------------------------------------------------------
# closure operator


def closure(emb: Embedding, e: RelObj, sigma):
    """c(σ) = η*(image of ΔL(m_σ)): pull the image of ΔL m_σ back along η_E."""
    ta, t = emb.ta, emb.presheaves
    m = inclusion(t, e, sigma)
    dlm = ta.D.on_arr(ta.L.on_arr(m))
    tau = image_predicate(t, dlm)
    return pullback_predicate(t, ta.unit(e), tau)


def closure_operator_check(emb: Embedding, b: Budget = DEFAULT_BUDGET, objects=None) -> Certificate:
    """Inflationary, idempotent, meet-preserving and pullback-stable on every enumerated subobject."""
    t = emb.presheaves
    p = t.doctrine
    cert = Certificate("closure_operator", emb.p.name, b.to_json())
    try:
        objs = objects if objects is not None else t.objects(b)
    except BudgetExhausted as exc:
        return cert.fail(str(exc), EXHAUSTED).done()
    cl: dict = {}
    for e in objs:
        a = e.obj
        preds = subobject_predicates(t, e)
        for s in preds:
            c = closure(emb, e, s)
            cl[(e, s)] = c
            cert.count("subobjects")
            if not is_subobject_predicate(t, e, c):
                return cert.fail({"closure_not_subobject": [t.label(e), p.label(a, s)]}).done()
            if not p.leq(a, s, c):
                return cert.fail({"not_inflationary": [t.label(e), p.label(a, s)]}).done()
        for s in preds:
            if closure(emb, e, cl[(e, s)]) != cl[(e, s)]:
                return cert.fail({"not_idempotent": [t.label(e), p.label(a, s)]}).done()
            for s2 in preds:
                cert.count("meets")
                if cl[(e, p.meet(a, s, s2))] != p.meet(a, cl[(e, s)], cl[(e, s2)]):
                    return cert.fail({"meet_not_preserved": [t.label(e), p.label(a, s), p.label(a, s2)]}).done()
    for x in objs:
        for e in objs:
            for f in t.hom(x, e):
                for s in subobject_predicates(t, e):
                    cert.count("pullbacks")
                    lhs = closure(emb, x, pullback_predicate(t, f, s))
                    rhs = pullback_predicate(t, f, cl[(e, s)])
                    if lhs != rhs:
                        return cert.fail({"not_pullback_stable": [t.label(f), p.label(e.obj, s)]}).done()
    return cert.done()


# ---------------------------------------------------------------------------
# sheaves


def sheaf_by_unit(emb: Embedding, e: RelObj) -> bool:
    """(a): the unit η_E is an isomorphism."""
    return emb.presheaves.inverse(emb.ta.unit(e)) is not None


def dense_subobjects(emb: Embedding, x: RelObj) -> list:
    t = emb.presheaves
    top = t.support(x)
    return [s for s in subobject_predicates(t, x) if closure(emb, x, s) == top]


def sheaf_by_extension(emb: Embedding, e: RelObj, objs, dense: dict | None = None):
    """(b): every u: M → E along a dense mono M ↣ X extends uniquely to X → E.

    Returns None on success, else a witness (X, σ, u, extension count).
    """
    t = emb.presheaves
    for x in objs:
        ds = dense[x] if dense is not None else dense_subobjects(emb, x)
        homs = t.hom(x, e)
        for s in ds:
            m = inclusion(t, x, s)
            restrictions: dict = {}
            for v in homs:
                r = t.compose(v, m)
                restrictions[r] = restrictions.get(r, 0) + 1
            for u in t.hom(m.dom, e):
                n = restrictions.get(u, 0)
                if n != 1:
                    return {"X": t.label(x), "dense": t.doctrine.label(x.obj, s), "u": t.label(u), "extensions": n}
    return None


def sheaf_check(emb: Embedding, e: RelObj, b: Budget = DEFAULT_BUDGET, objects=None) -> Certificate:
    t = emb.presheaves
    cert = Certificate("sheaf", repr(t.label(e)), b.to_json())
    objs = objects if objects is not None else t.objects(b)
    a = sheaf_by_unit(emb, e)
    bad = sheaf_by_extension(emb, e, objs)
    cert.checks["unit_iso"] = int(a)
    cert.checks["unique_extension"] = int(bad is None)
    if a != (bad is None):
        return cert.fail({"definitions_disagree": t.label(e), "extension_witness": bad}).done()
    if not a:
        cert.fail({"not_a_sheaf": t.label(e), "extension_witness": bad}, ABSENT)
    return cert.done()


def sheaf_roster(emb: Embedding, b: Budget = DEFAULT_BUDGET):
    """Sheaves among enumerated presheaf objects, checked against the essential image of Δ.

    Definitions (a) and (b) must agree on every object; each sheaf E is
    isomorphic to Δ(L E) via η_E; each object isomorphic to some ΔF is a sheaf;
    every ΔF itself satisfies (b).  Every disagreement is listed under
    ``discrepancies`` in the witness.
    """
    t, tq, ta = emb.presheaves, emb.sheaves, emb.ta
    cert = Certificate("sheaf_roster", emb.p.name, b.to_json())
    try:
        objs = t.objects(b)
        fobs = tq.objects(b)
    except BudgetExhausted as exc:
        return [], cert.fail(str(exc), EXHAUSTED).done()
    dense = {x: dense_subobjects(emb, x) for x in objs}
    roster = []
    discrepancies = []
    deltas = [ta.D.on_obj(f) for f in fobs]
    for e in objs:
        a = sheaf_by_unit(emb, e)
        bad = sheaf_by_extension(emb, e, objs, dense)
        cert.count("objects")
        if a != (bad is None):
            discrepancies.append({"definitions_disagree": t.label(e), "extension_witness": bad})
        in_image = any(any(t.inverse(i) is not None for i in t.hom(e, d)) for d in deltas)
        if a != in_image:
            discrepancies.append({"roster_vs_image": t.label(e), "sheaf": a, "in_image": in_image})
        if a:
            roster.append(e)
    for f, d in zip(fobs, deltas):
        cert.count("delta_objects")
        bad = sheaf_by_extension(emb, d, objs, dense)
        if bad is not None:
            discrepancies.append({"delta_not_sheaf": tq.label(f), "witness": bad})
    cert.checks["sheaves"] = len(roster)
    cert.witness({"sheaves": [t.label(e) for e in roster], "discrepancies": discrepancies})
    if discrepancies:
        cert.fail(discrepancies[0])
    return roster, cert.done()


def closure_table(emb: Embedding, b: Budget = DEFAULT_BUDGET) -> list:
    """Rows (object, [(σ, c(σ)), ...]) for every enumerated presheaf object."""
    t = emb.presheaves
    p = t.doctrine
    rows = []
    for e in t.objects(b):
        pairs = [[p.label(e.obj, s), p.label(e.obj, closure(emb, e, s))] for s in subobject_predicates(t, e)]
        rows.append({"object": t.label(e), "closures": pairs})
    return rows


# ---------------------------------------------------------------------------
# left exactness of L, spot-checked


def product_object(t: TCategory, x: RelObj, y: RelObj) -> RelObj:
    """(A×B, ρ⊠σ) with ρ⊠σ((a,b),(a',b')) = ρ(a,a') ∧ σ(b,b')."""
    c, p = t.base, t.doctrine
    ab, p1, p2 = t.s.two(x.obj, y.obj)
    sq, l, r = t.s.two(ab, ab)
    to_a = c.pair(c.compose(p1, l), c.compose(p1, r))
    to_b = c.pair(c.compose(p2, l), c.compose(p2, r))
    return RelObj(ab, p.meet(sq, p.reindex(to_a, x.pred), p.reindex(to_b, y.pred)))


def equalizer_object(t: TCategory, f: Rel, g: Rel) -> RelObj:
    """(A, ρ ∧ π1*∃_{π_A}(φ ∧ γ)) for parallel f, g: (A, ρ) → (B, σ)."""
    p = t.doctrine
    x = f.dom
    ab, pa, _ = t.s.two(x.obj, f.cod.obj)
    aa, q1, _ = t.s.two(x.obj, x.obj)
    delta = p.exists(pa, p.meet(ab, f.phi, g.phi))
    return RelObj(x.obj, p.meet(aa, x.pred, p.reindex(q1, delta)))


def lex_spot_check(l: Functor, src: TCategory, dst: TCategory, b: Budget = DEFAULT_BUDGET, *,
                   sample: int = 50, seed: int = 0, instance: str = "") -> Certificate:
    """L sends the terminal object, sampled binary products and sampled equalizers to the same constructions."""
    cert = Certificate("lex_spot_check", instance or l.name, b.to_json())
    cert.seed = seed
    try:
        objs = src.objects(b)
    except BudgetExhausted as exc:
        return cert.fail(str(exc), EXHAUSTED).done()
    rng = random.Random(seed)
    one = src.base.terminal()
    top_src = RelObj(one, src.doctrine.top(src.s.two(one, one)[0]))
    top_dst = RelObj(one, dst.doctrine.top(dst.s.two(one, one)[0]))
    if l.on_obj(top_src) != top_dst:
        return cert.fail({"terminal": src.label(top_src)}).done()
    cert.count("terminal")
    for _ in range(sample):
        x, y = rng.choice(objs), rng.choice(objs)
        cert.count("products")
        if l.on_obj(product_object(src, x, y)) != product_object(dst, l.on_obj(x), l.on_obj(y)):
            return cert.fail({"product": [src.label(x), src.label(y)]}).done()
        hs = src.hom(x, y)
        if not hs:
            continue
        f, g = rng.choice(hs), rng.choice(hs)
        cert.count("equalizers")
        if l.on_obj(equalizer_object(src, f, g)) != equalizer_object(dst, l.on_arr(f), l.on_arr(g)):
            return cert.fail({"equalizer": [src.label(f), src.label(g)]}).done()
    return cert.done()


def sheafify(p: Doctrine, b: Budget = DEFAULT_BUDGET, *, seed: int = 0, table: bool = True) -> Certificate:
    """Embedding, left exactness of L, closure operator laws, sheaf definitions and roster in one report.

    With ``table`` the witness carries the closure table per object.
    """
    cert = Certificate("sheafification", p.name, b.to_json())
    emb, ec = embed(p, b)
    cert.add(ec)
    cert.add(lex_spot_check(emb.ta.L, emb.presheaves, emb.sheaves, b, seed=seed, instance=f"L for {p.name}"))
    cert.add(closure_operator_check(emb, b))
    _, rc = sheaf_roster(emb, b)
    cert.add(rc)
    if table:
        cert.witness({"closure_table": closure_table(emb, b)})
    return cert.done()
