"""Presheaf-side completions and the comparison functors out of P^∃."""
from __future__ import annotations

from typing import Callable

from .certificate import EXHAUSTED, Certificate
from .completions import (PointsCategory, PointwiseCompletion, PtArrow, compex_to_psi, existential_completion,
                          points, points_weak_subobjects, psi_to_compex)
from .doctrine import Doctrine, DoctrineMorphism, check_morphism, weak_subobjects
from .fincat import DEFAULT_BUDGET, Budget, BudgetExhausted, EnumCategory, equivalence_check
from .relational import (IdentityBaseAdjunction, Rel, RelCategory, RelObj, RegCategory, TCategory,
                         ToposAdjunction, fibrewise_adjunction, t_of_morphism, topos_adjunction_check)


def presh(p: Doctrine, b: Budget = DEFAULT_BUDGET) -> TCategory:
    """presh(P) = T_{Ψ_{G_P}}."""
    psi = points_weak_subobjects(points(p), b)
    return TCategory(psi, b, name=f"presh({p.name})")


def exlex(c: EnumCategory, b: Budget = DEFAULT_BUDGET) -> TCategory:
    """ex/lex(C) = T_{Ψ_C}."""
    return TCategory(weak_subobjects(c, b), b, name=f"exlex({c.name})")


def reglex(c: EnumCategory, b: Budget = DEFAULT_BUDGET) -> RegCategory:
    """reg/lex(C) = Reg(Ψ_C)."""
    cat = RegCategory(weak_subobjects(c, b), b)
    cat.name = f"reglex({c.name})"
    return cat


def fibre_iso_morphism(pe: Doctrine, psi: Doctrine, fibre_map: Callable | None = None) -> DoctrineMorphism:
    """(I, 𝔟): P^∃ → Ψ_{G_P} with I(A) = (A, ⊤) and 𝔟 the fibre isomorphism."""
    g: PointsCategory = psi.base
    c = g.base
    fmap = fibre_map or (lambda a, s: compex_to_psi(pe, psi, a, s))
    return DoctrineMorphism(
        pe, psi, g.top_point,
        lambda f: PtArrow(g.top_point(c.dom(f)), g.top_point(c.cod(f)), f),
        fmap, name="compex_to_psi")


def _fibre_bijection(m: DoctrineMorphism, b: Budget) -> Certificate:
    """𝔟 is a bijection P^∃(A) → Ψ(A, ⊤) that preserves and reflects the order."""
    cert = Certificate("fibre_isomorphism", m.name, b.to_json())
    pe, psi = m.src, m.dst
    try:
        objs = pe.base.objects(b)
    except BudgetExhausted as exc:
        return cert.fail(str(exc), EXHAUSTED).done()
    for a in objs:
        ta = m.on_obj(a)
        src = pe.elements(a)
        images = [m.b(a, s) for s in src]
        cert.count("elements", len(src))
        if len(set(images)) != len(src) or set(images) != set(psi.elements(ta)):
            return cert.fail({"not_bijective": pe.base.label(a)}).done()
        for s, x in zip(src, images):
            for t, y in zip(src, images):
                if pe.leq(a, s, t) != psi.leq(ta, x, y):
                    return cert.fail({"order_not_preserved": [pe.label(a, s), pe.label(a, t)]}).done()
    return cert.done()


def _top_form(cat: RelCategory, y: RelObj):
    """The constructive iso y ≅ ((A, ⊤), ∃ pred) of a codomain object.

    Returns (top-form object, iso from it to y, inverse).
    """
    psi = cat.doctrine
    g: PointsCategory = cat.base
    c = g.base
    a = y.obj.obj
    top = g.top_point(a)
    carrier = cat._pred_obj(y.obj)
    top_carrier = cat._pred_obj(top)
    pred = psi.exists(PtArrow(carrier, top_carrier, c.identity(carrier.obj)), y.pred)
    x = RelObj(top, pred)
    ident = cat.identity(y).phi
    yy = cat.s.two(y.obj, y.obj)[0]
    xy = cat.s.two(top, y.obj)[0]
    yx = cat.s.two(y.obj, top)[0]
    iso = Rel(x, y, psi.exists(PtArrow(yy, xy, c.identity(yy.obj)), ident))
    inv = Rel(y, x, psi.exists(PtArrow(yy, yx, c.identity(yy.obj)), ident))
    return x, iso, inv


def _comparison(kind: str, p: Doctrine, b: Budget, fibre_map: Callable | None, instance: str):
    pe, cm = existential_completion(p, b)
    psi = points_weak_subobjects(points(p), b)
    m = fibre_iso_morphism(pe, psi, fibre_map)
    if kind == "reg":
        src, dst = RegCategory(pe, b), RegCategory(psi, b)
    else:
        src, dst = TCategory(pe, b), TCategory(psi, b, name=f"presh({p.name})")
    k = t_of_morphism(m, src, dst)
    cert = Certificate(f"comparison_{kind}", instance or p.name, b.to_json())
    cert.add(cm.certificate)
    cert.add(_fibre_bijection(m, b))
    cert.add(check_morphism(m, b))

    def eso(y: RelObj):
        x_top, iso, inv = _top_form(dst, y)
        pe_pred = psi_to_compex(pe, psi, dst._pred_obj(x_top.obj).obj if kind == "T" else x_top.obj.obj,
                                x_top.pred)
        x = RelObj(x_top.obj.obj, pe_pred)
        if k.on_obj(x) != x_top:
            return None
        return x, iso, inv

    cert.add(equivalence_check(k, b, eso=eso, instance=f"{src.name} -> {dst.name}", laws=True))
    return k, cert


def comparison_reg(p: Doctrine, b: Budget = DEFAULT_BUDGET, *, fibre_map: Callable | None = None,
                   instance: str = ""):
    """Reg(P^∃) → Reg(Ψ_{G_P}) induced by the fibre isomorphism; certified an equivalence at budget."""
    k, cert = _comparison("reg", p, b, fibre_map, instance)
    return k, cert.done()


def comparison_ex(p: Doctrine, b: Budget = DEFAULT_BUDGET, *, fibre_map: Callable | None = None,
                  adjunction: bool = True, instance: str = ""):
    """T_{P^∃} → presh(P), plus the adjunction between ex/lex(C) and T_{P^∃} with invertible counit."""
    k, cert = _comparison("T", p, b, fibre_map, instance)
    if adjunction:
        cert.add(exlex_adjunction_check(p, b))
    return k, cert.done()


def exlex_adjunction(p: Doctrine, b: Budget = DEFAULT_BUDGET) -> IdentityBaseAdjunction:
    """left ⊣ right between P^∃ and Ψ_C, left forgetting the predicate part of a span."""
    pe, _ = existential_completion(p, b)
    wc = weak_subobjects(p.base, b)
    if isinstance(pe, PointwiseCompletion):
        full = pe.from_mask((1 << pe.ds.n) - 1)
        empty = pe.from_mask(0)
        inh, emp = wc.v.index("inhabited"), wc.v.index("empty")

        def left(a, s):
            return tuple(inh if pe.mask(k) else emp for k in s)

        def right(a, w):
            return tuple(full if k == inh else empty for k in w)
    else:
        def left(a, s):
            return wc.classify(a, s[0])

        def right(a, w):
            return pe.classify(a, w, p.top(pe.base.dom(w)))

    return IdentityBaseAdjunction(pe, wc, left, right, name=f"exlex_adjunction({p.name})")


def exlex_adjunction_check(p: Doctrine, b: Budget = DEFAULT_BUDGET) -> Certificate:
    adj = exlex_adjunction(p, b)
    cert = Certificate("exlex_adjunction", p.name, b.to_json())
    cert.add(fibrewise_adjunction(adj, b))
    if not cert.ok:
        return cert.done()
    tr = TCategory(adj.r, b)
    tq = TCategory(adj.q, b, name=f"exlex({p.base.name})")
    ta = ToposAdjunction(adj, tr, tq, b=b)
    cert.add(topos_adjunction_check(ta, b, instance=adj.name))
    return cert.done()
