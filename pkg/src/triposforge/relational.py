"""Relational categories over a doctrine: Reg(P) and the tripos-to-topos T_P."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Any, Callable

from .certificate import EXHAUSTED, Certificate, jsonable
from .doctrine import Doctrine, DoctrineMorphism, diagonal, equality_predicate, prod2, prod3, swap
from .fincat import DEFAULT_BUDGET, Budget, BudgetExhausted, EnumCategory, Functor


class RelationError(ValueError):
    """A relation fails an admission clause; ``clause`` names it."""

    def __init__(self, clause: str, detail: str = ""):
        super().__init__(f"clause {clause} fails{': ' + detail if detail else ''}")
        self.clause = clause


@dataclass(frozen=True)
class RelObj:
    """(A, α) in Reg(P), or (A, ρ) in T_P."""

    obj: Any
    pred: Any

    def to_json(self) -> dict:
        return {"obj": jsonable(self.obj), "pred": jsonable(self.pred)}


@dataclass(frozen=True)
class Rel:
    dom: RelObj
    cod: RelObj
    phi: Any

    def to_json(self) -> Any:
        return jsonable(self.phi)


class _Structure:
    """Projections and tuple arrows on binary and ternary products, memoized."""

    def __init__(self, c: EnumCategory):
        self.c = c
        self._two: dict = {}
        self._three: dict = {}

    def two(self, a, b):
        key = (a, b)
        if key not in self._two:
            self._two[key] = prod2(self.c, a, b)
        return self._two[key]

    def three(self, a, b, d):
        """(A×B×D, ⟨1,2⟩, ⟨1,3⟩, ⟨2,3⟩) into the binary products."""
        key = (a, b, d)
        if key not in self._three:
            c = self.c
            t, r1, r2, r3 = prod3(c, a, b, d)
            self._three[key] = (t, c.pair(r1, r2), c.pair(r1, r3), c.pair(r2, r3))
        return self._three[key]


class RelCategory(EnumCategory):
    """Shared enumeration and relational composition."""

    kind = "rel"

    def __init__(self, p: Doctrine, budget: Budget = DEFAULT_BUDGET):
        self.doctrine = p
        self.base = p.base
        self.budget = budget
        self.s = _Structure(p.base)
        self._homs: dict = {}
        self._objs = None
        self.use_fast = True

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.doctrine.name}>"

    def compose(self, g: Rel, f: Rel) -> Rel:
        p = self.doctrine
        a, b, d = f.dom.obj, f.cod.obj, g.cod.obj
        t, t12, t13, t23 = self.s.three(a, b, d)
        inner = p.meet(t, p.reindex(t12, f.phi), p.reindex(t23, g.phi))
        return Rel(f.dom, g.cod, p.exists(t13, inner))

    def hom(self, x: RelObj, y: RelObj) -> tuple:
        key = (x, y)
        if key not in self._homs:
            fast = self.fast_hom(x, y) if self.use_fast else None
            self._homs[key] = fast if fast is not None else self.search_hom(x, y)
        return self._homs[key]

    def search_hom(self, x: RelObj, y: RelObj) -> tuple:
        """Filter every fibre element below the bound through the admission clauses."""
        p = self.doctrine
        ab, _, _ = self.s.two(x.obj, y.obj)
        bound = self.bound(x, y)
        if p.fibre_size(ab) > self.budget.max_fibre ** 2:
            raise BudgetExhausted("hom-set candidates exceed the fibre budget")
        return tuple(Rel(x, y, phi) for phi in p.elements_below(ab, bound)
                     if self.violation(x, y, phi) is None)

    def fast_hom(self, x: RelObj, y: RelObj):
        return None

    def converse(self, f: Rel) -> Rel:
        p = self.doctrine
        return Rel(f.cod, f.dom, p.reindex(swap(self.base, f.cod.obj, f.dom.obj), f.phi))

    def admit(self, x: RelObj, y: RelObj, phi) -> Rel:
        clause = self.violation(x, y, phi, check_bound=True)
        if clause is not None:
            raise RelationError(clause)
        return Rel(x, y, phi)

    def objects(self, budget: Budget | None = None) -> tuple:
        budget = budget or self.budget
        if self._objs is None or budget != self.budget:
            out = []
            for a in self.base.objects(budget):
                for x in self.candidate_preds(a):
                    if self.object_violation(a, x) is None:
                        out.append(RelObj(a, x))
                        if len(out) > budget.max_objects * 8:
                            raise BudgetExhausted("too many objects")
            if budget != self.budget:
                return tuple(out)
            self._objs = tuple(out)
        return self._objs

    def label(self, x) -> Any:
        p = self.doctrine
        if isinstance(x, RelObj):
            return {"obj": self.base.label(x.obj), "pred": p.label(self._pred_obj(x.obj), x.pred)}
        if isinstance(x, Rel):
            ab, _, _ = self.s.two(x.dom.obj, x.cod.obj)
            return p.label(ab, x.phi)
        return jsonable(x)

    # subclass hooks
    def bound(self, x, y):
        raise NotImplementedError

    def violation(self, x, y, phi, check_bound: bool = False) -> str | None:
        raise NotImplementedError

    def candidate_preds(self, a):
        raise NotImplementedError

    def object_violation(self, a, x) -> str | None:
        return None

    def _pred_obj(self, a):
        return a


class RegCategory(RelCategory):
    """Reg(P): objects (A, α); arrows φ ∈ P(A×B) that are total on α and single-valued."""

    kind = "reg"

    def __init__(self, p: Doctrine, budget: Budget = DEFAULT_BUDGET):
        super().__init__(p, budget)
        self.name = f"reg({p.name})"
        self._delta: dict = {}

    def delta(self, b):
        if b not in self._delta:
            self._delta[b] = equality_predicate(self.doctrine, b)
        return self._delta[b]

    def candidate_preds(self, a):
        return self.doctrine.elements(a)

    def bound(self, x: RelObj, y: RelObj):
        p = self.doctrine
        ab, p1, p2 = self.s.two(x.obj, y.obj)
        return p.meet(ab, p.reindex(p1, x.pred), p.reindex(p2, y.pred))

    def violation(self, x, y, phi, check_bound=False):
        p = self.doctrine
        a, b = x.obj, y.obj
        ab, p1, _ = self.s.two(a, b)
        if check_bound and not p.leq(ab, phi, self.bound(x, y)):
            return "1"
        if not p.leq(a, x.pred, p.exists(p1, phi)):
            return "2"
        t, t12, t13, t23 = self.s.three(a, b, b)
        lhs = p.meet(t, p.reindex(t12, phi), p.reindex(t13, phi))
        if not p.leq(t, lhs, p.reindex(t23, self.delta(b))):
            return "3"
        return None

    def identity(self, x: RelObj) -> Rel:
        p = self.doctrine
        a = x.obj
        aa, p1, p2 = self.s.two(a, a)
        phi = p.meet(aa, self.delta(a), p.meet(aa, p.reindex(p1, x.pred), p.reindex(p2, x.pred)))
        return Rel(x, x, phi)


class TCategory(RelCategory):
    """T_P: partial equivalence predicates and functional relations.

    The identity on (A, ρ) is ρ itself and composition is relational.
    """

    kind = "T"

    def __init__(self, p: Doctrine, budget: Budget = DEFAULT_BUDGET, name: str | None = None):
        super().__init__(p, budget)
        self.name = name or f"T({p.name})"

    def _pred_obj(self, a):
        return self.s.two(a, a)[0]

    def support(self, x: RelObj):
        """E(a) = ρ(a, a)."""
        return self.doctrine.reindex(diagonal(self.base, x.obj), x.pred)

    def candidate_preds(self, a):
        return self.doctrine.elements(self.s.two(a, a)[0])

    def object_violation(self, a, rho) -> str | None:
        p = self.doctrine
        aa, _, _ = self.s.two(a, a)
        if not p.leq(aa, rho, p.reindex(swap(self.base, a, a), rho)):
            return "symmetry"
        t, t12, t13, t23 = self.s.three(a, a, a)
        if not p.leq(t, p.meet(t, p.reindex(t12, rho), p.reindex(t23, rho)), p.reindex(t13, rho)):
            return "transitivity"
        return None

    def make_object(self, a, rho) -> RelObj:
        bad = self.object_violation(a, rho)
        if bad is not None:
            raise RelationError(bad)
        return RelObj(a, rho)

    def bound(self, x: RelObj, y: RelObj):
        p = self.doctrine
        ab, p1, p2 = self.s.two(x.obj, y.obj)
        return p.meet(ab, p.reindex(p1, self.support(x)), p.reindex(p2, self.support(y)))

    def violation(self, x, y, phi, check_bound=False):
        p = self.doctrine
        a, b = x.obj, y.obj
        ab, p1, _ = self.s.two(a, b)
        if check_bound and not p.leq(ab, phi, self.bound(x, y)):
            return "i"
        t, t12, t13, t23 = self.s.three(a, a, b)
        if not p.leq(t, p.meet(t, p.reindex(t12, x.pred), p.reindex(t13, phi)), p.reindex(t23, phi)):
            return "ii"
        t, t12, t13, t23 = self.s.three(a, b, b)
        r_phi12 = p.reindex(t12, phi)
        if not p.leq(t, p.meet(t, p.reindex(t23, y.pred), r_phi12), p.reindex(t13, phi)):
            return "iii"
        if not p.leq(t, p.meet(t, r_phi12, p.reindex(t13, phi)), p.reindex(t23, y.pred)):
            return "iv"
        if not p.leq(a, self.support(x), p.exists(p1, phi)):
            return "v"
        return None

    def identity(self, x: RelObj) -> Rel:
        return Rel(x, x, x.pred)

    def inverse(self, f: Rel) -> Rel | None:
        """An inverse of a functional relation is necessarily its converse."""
        g = self.converse(f)
        if self.violation(g.dom, g.cod, g.phi, check_bound=True) is not None:
            return None
        if self.compose(g, f) != self.identity(f.dom) or self.compose(f, g) != self.identity(f.cod):
            return None
        return g

    def fast_hom(self, x: RelObj, y: RelObj):
        """Row-by-row backtracking over per-point values, for pointwise doctrines.

        Clauses (i), (iii), (iv), (v) constrain single rows φ(a, -); clause (ii)
        links rows and is checked when rows are combined.
        """
        p = self.doctrine
        ops = p.pointwise_ops()
        if ops is None:
            return None
        na, nb = p.npoints(x.obj), p.npoints(y.obj)
        rho, sig = x.pred, y.pred
        below, meet, join, le, bot = ops.below, ops.meet, ops.join, ops.le, ops.bottom
        ea = [rho[a * na + a] for a in range(na)]
        fb = [sig[b * nb + b] for b in range(nb)]

        def rows(a):
            out = []
            row = [bot] * nb
            cands = [below(meet(ea[a], fb[b])) for b in range(nb)]

            def go(b):
                if b == nb:
                    acc = bot
                    for v in row:
                        acc = join(acc, v)
                    if le(ea[a], acc):
                        out.append(tuple(row))
                    return
                for v in cands[b]:
                    ok = True
                    for b2 in range(b):
                        w = row[b2]
                        s12, s21 = sig[b2 * nb + b], sig[b * nb + b2]
                        if not (le(meet(s12, w), v) and le(meet(s21, v), w)
                                and le(meet(v, w), s21) and le(meet(w, v), s12)):
                            ok = False
                            break
                    if ok:
                        row[b] = v
                        go(b + 1)
                row[b] = bot

            go(0)
            return out

        per_row = [rows(a) for a in range(na)]
        found = []
        chosen: list = []

        def combine(a):
            if a == na:
                phi = tuple(v for r in chosen for v in r)
                found.append(Rel(x, y, phi))
                return
            for r in per_row[a]:
                ok = True
                for a2, r2 in enumerate(chosen):
                    r12, r21 = rho[a2 * na + a], rho[a * na + a2]
                    for b in range(nb):
                        if not (le(meet(r12, r2[b]), r[b]) and le(meet(r21, r[b]), r2[b])):
                            ok = False
                            break
                    if not ok:
                        break
                if ok:
                    chosen.append(r)
                    combine(a + 1)
                    chosen.pop()

        combine(0)
        return tuple(sorted(found, key=lambda f: f.phi))


def reg_completion(p: Doctrine, b: Budget = DEFAULT_BUDGET) -> RegCategory:
    return RegCategory(p, b)


def tripos_to_topos(p: Doctrine, b: Budget = DEFAULT_BUDGET) -> TCategory:
    return TCategory(p, b)


def category_laws(cat: RelCategory, b: Budget = DEFAULT_BUDGET, *, sample: int | None = None,
                  seed: int = 0, instance: str = "") -> Certificate:
    """Identity laws on every enumerated arrow; closure and associativity of composition.

    With ``sample`` set, composable triples are drawn with a seeded RNG and
    the composite is re-admitted clause by clause.
    """
    cert = Certificate(f"{cat.kind}_category_laws", instance or cat.name, b.to_json())
    try:
        objs = cat.objects(b)
    except BudgetExhausted as exc:
        return cert.fail(str(exc), EXHAUSTED).done()
    ids = {}
    for x in objs:
        i = cat.identity(x)
        clause = cat.violation(x, x, i.phi, check_bound=True)
        if clause is not None:
            return cert.fail({"identity_not_admitted": cat.label(x), "clause": clause}).done()
        ids[x] = i
    arrows = []
    for x in objs:
        for y in objs:
            for f in cat.hom(x, y):
                arrows.append(f)
                cert.count("arrows")
                if cat.compose(f, ids[x]) != f or cat.compose(ids[y], f) != f:
                    return cert.fail({"identity_law": cat.label(f), "dom": cat.label(x), "cod": cat.label(y)}).done()
    by_dom: dict = {}
    for f in arrows:
        by_dom.setdefault(f.dom, []).append(f)
    triples = []
    for f in arrows:
        for g in by_dom.get(f.cod, []):
            for h in by_dom.get(g.cod, []):
                triples.append((f, g, h))
    if sample is not None:
        cert.seed = seed
        rng = random.Random(seed)
        triples = rng.sample(triples, min(sample, len(triples))) if triples else []
    for f, g, h in triples:
        cert.count("triples")
        gf = cat.compose(g, f)
        hg = cat.compose(h, g)
        for comp in (gf, hg):
            clause = cat.violation(comp.dom, comp.cod, comp.phi, check_bound=True)
            if clause is not None:
                return cert.fail({"composite_not_admitted": cat.label(comp), "clause": clause}).done()
        hgf = cat.compose(h, gf)
        clause = cat.violation(hgf.dom, hgf.cod, hgf.phi, check_bound=True)
        if clause is not None:
            return cert.fail({"composite_not_admitted": cat.label(hgf), "clause": clause}).done()
        if hgf != cat.compose(hg, f):
            return cert.fail({"associativity": [cat.label(f), cat.label(g), cat.label(h)]}).done()
    return cert.done()


# ---------------------------------------------------------------------------
# functors induced by doctrine morphisms


def t_of_morphism(m: DoctrineMorphism, src: RelCategory, dst: RelCategory) -> Functor:
    """T(F, 𝔟) (or Reg(F, 𝔟)): applies F to carriers and 𝔟 to relations.

    F must send the chosen binary products of the source base to those of
    the target base; this is checked on every object pair it meets.
    """
    def carrier_pair(a, b):
        ab = src.s.two(a, b)[0]
        fab = dst.s.two(m.on_obj(a), m.on_obj(b))[0]
        if m.on_obj(ab) != fab:
            raise ValueError("functor does not preserve the chosen products")
        return ab

    def on_obj(x: RelObj) -> RelObj:
        a = x.obj
        pa = carrier_pair(a, a) if src.kind == "T" else a
        return RelObj(m.on_obj(a), m.b(pa, x.pred))

    def on_arr(f: Rel) -> Rel:
        ab = carrier_pair(f.dom.obj, f.cod.obj)
        return Rel(on_obj(f.dom), on_obj(f.cod), m.b(ab, f.phi))

    return Functor(src, dst, on_obj, on_arr, name=f"{src.kind}({m.name})")


# ---------------------------------------------------------------------------
# adjunctions induced by fibrewise adjunctions over the same base


@dataclass
class IdentityBaseAdjunction:
    """left ⊣ right between doctrines R and Q over one base, fibrewise.

    ``left`` maps R(A) → Q(A) and ``right`` maps Q(A) → R(A); the induced
    functors L = T(id, left): T_R → T_Q and Δ = T(id, right) form an
    adjunction L ⊣ Δ with identity counit whenever left∘right = id.
    """

    r: Doctrine
    q: Doctrine
    left: Callable
    right: Callable
    name: str = "adjunction"

    def __post_init__(self):
        from .doctrine import identity_base_morphism
        self.left_morphism = identity_base_morphism(self.r, self.q, self.left, f"{self.name}.left")
        self.right_morphism = identity_base_morphism(self.q, self.r, self.right, f"{self.name}.right")


def fibrewise_adjunction(adj: IdentityBaseAdjunction, b: Budget = DEFAULT_BUDGET) -> Certificate:
    from .doctrine import check_morphism
    cert = Certificate("fibrewise_adjunction", adj.name, b.to_json())
    cert.add(check_morphism(adj.left_morphism, b))
    cert.add(check_morphism(adj.right_morphism, b))
    r, q = adj.r, adj.q
    try:
        objs = r.base.objects(b)
    except BudgetExhausted as exc:
        return cert.fail(str(exc), EXHAUSTED).done()
    for a in objs:
        for s in r.elements(a):
            for t in q.elements(a):
                cert.count("galois_pairs")
                if q.leq(a, adj.left(a, s), t) != r.leq(a, s, adj.right(a, t)):
                    return cert.fail({"not_adjoint": [r.label(a, s), q.label(a, t)]}).done()
        for t in q.elements(a):
            cert.count("counit")
            if not q.eq(a, adj.left(a, adj.right(a, t)), t):
                return cert.fail({"counit_not_iso": q.label(a, t)}).done()
    return cert.done()


def preserves_exists(m: DoctrineMorphism, b: Budget = DEFAULT_BUDGET) -> Certificate:
    """𝔟(∃_f x) = ∃_f 𝔟(x) for every enumerated arrow f and element x."""
    cert = Certificate("preserves_exists", m.name, b.to_json())
    p, r = m.src, m.dst
    c = p.base
    try:
        objs = c.objects(b)
    except BudgetExhausted as exc:
        return cert.fail(str(exc), EXHAUSTED).done()
    for a in objs:
        for d in objs:
            for f in c.hom(a, d):
                for x in p.elements(a):
                    cert.count("pairs")
                    lhs = m.b(d, p.exists(f, x))
                    rhs = r.exists(m.on_arr(f), m.b(a, x))
                    if not r.eq(m.on_obj(d), lhs, rhs):
                        return cert.fail({"arrow": c.label(f), "element": p.label(a, x)}).done()
    return cert.done()


class Singletons:
    """Singleton predicates on power objects of a tripos Q.

    For F = (A, ρ) in T_Q with power object (PA, ∈), Sing F = (PA, σ) where
    σ(S, S') = sing(S) ∧ sing(S') ∧ ∀a (S(a) ↔ S'(a)) and sing(S) says S is
    an inhabited, strict, ρ-closed and ρ-coherent subset.
    """

    def __init__(self, tq: "TCategory"):
        self.t = tq
        self.q = tq.doctrine
        self.c = tq.base
        self._power: dict = {}
        self._sing: dict = {}

    def power(self, a):
        if a not in self._power:
            self._power[a] = self.q.power_object(a)
        return self._power[a]

    def sing_pred(self, f: RelObj):
        """sing(S) ∈ Q(PA)."""
        if f not in self._sing:
            q, c = self.q, self.c
            a = f.obj
            pa, mem = self.power(a)
            apa, p1, p2 = prod2(c, a, pa)
            inhabited = q.exists(p2, mem)
            strict = q.forall(p2, q.implies(apa, mem, q.reindex(p1, self.t.support(f))))
            t, t12, t13, t23 = self.t.s.three(a, a, pa)
            _, _, _, r3 = prod3(c, a, a, pa)
            s_a = q.reindex(t13, mem)
            s_b = q.reindex(t23, mem)
            rho = q.reindex(t12, f.pred)
            closed = q.forall(r3, q.implies(t, q.meet(t, s_a, rho), s_b))
            coherent = q.forall(r3, q.implies(t, q.meet(t, s_a, s_b), rho))
            self._sing[f] = q.meet_all(pa, (inhabited, strict, closed, coherent))
        return self._sing[f]

    def obj(self, f: RelObj) -> RelObj:
        q, c = self.q, self.c
        a = f.obj
        pa, mem = self.power(a)
        sing = self.sing_pred(f)
        pp, s1, s2 = prod2(c, pa, pa)
        t, t12, t13, t23 = self.t.s.three(a, pa, pa)
        same = q.forall(t23, q.iff(t, q.reindex(t12, mem), q.reindex(t13, mem)))
        return RelObj(pa, q.meet_all(pp, (q.reindex(s1, sing), q.reindex(s2, sing), same)))

    def image(self, phi: Rel):
        """I(b, S) = ∃a (S(a) ∧ φ(a, b)) on B × PA."""
        q = self.q
        a, b = phi.dom.obj, phi.cod.obj
        pa, mem = self.power(a)
        t, t12, t13, t23 = self.t.s.three(b, a, pa)
        phi_ba = q.reindex(swap(self.c, b, a), phi.phi)
        inner = q.meet(t, q.reindex(t23, mem), q.reindex(t12, phi_ba))
        return q.exists(t13, inner)

    def arrow(self, phi: Rel) -> Rel:
        """Sing φ (S, T) = sing(S) ∧ sing(T) ∧ ∀b (T(b) ↔ ∃a (S(a) ∧ φ(a, b)))."""
        q, c = self.q, self.c
        b = phi.cod.obj
        pa, _ = self.power(phi.dom.obj)
        pb, mem_b = self.power(b)
        img = self.image(phi)
        t, t12, t13, t23 = self.t.s.three(b, pa, pb)
        agree = q.forall(t23, q.iff(t, q.reindex(t13, mem_b), q.reindex(t12, img)))
        st, s1, s2 = prod2(c, pa, pb)
        pred = q.meet_all(st, (q.reindex(s1, self.sing_pred(phi.dom)),
                               q.reindex(s2, self.sing_pred(phi.cod)), agree))
        return Rel(self.obj(phi.dom), self.obj(phi.cod), pred)

    def counit(self, f: RelObj, dom: RelObj | None = None) -> Rel:
        """ε(S, a) = sing(S) ∧ S(a), from Sing F (or a copy of it) to F."""
        q, c = self.q, self.c
        a = f.obj
        pa, mem = self.power(a)
        pxa, s1, _ = prod2(c, pa, a)
        pred = q.meet(pxa, q.reindex(s1, self.sing_pred(f)), q.reindex(swap(c, pa, a), mem))
        return Rel(dom or self.obj(f), f, pred)

    def counit_inverse(self, f: RelObj, cod: RelObj | None = None) -> Rel:
        """ε⁻¹(a, S) = E(a) ∧ sing(S) ∧ ∀b (ρ(a, b) ↔ S(b))."""
        q, c = self.q, self.c
        a = f.obj
        pa, mem = self.power(a)
        t, t12, t13, t23 = self.t.s.three(a, a, pa)
        cls = q.forall(t13, q.iff(t, q.reindex(t12, f.pred), q.reindex(t23, mem)))
        apa, p1, p2 = prod2(c, a, pa)
        pred = q.meet_all(apa, (q.reindex(p1, self.t.support(f)), q.reindex(p2, self.sing_pred(f)), cls))
        return Rel(f, cod or self.obj(f), pred)


class ToposAdjunction:
    """L ⊣ Δ between T_R and T_Q induced by an identity-base adjunction left ⊣ right.

    L is always T(id, left). In ``direct`` mode Δ = T(id, right), valid when
    right preserves ∃; the counit is then the identity relation. Otherwise
    (``singleton`` mode) Δ F = T(id, right)(Sing F), the direct image through
    singleton predicates, with counit ε(S, a) = sing(S) ∧ S(a).
    """

    def __init__(self, adj: IdentityBaseAdjunction, tr: TCategory, tq: TCategory, mode: str | None = None,
                 b: Budget = DEFAULT_BUDGET):
        self.adj = adj
        self.tr = tr
        self.tq = tq
        if mode is None:
            mode = "direct" if preserves_exists(adj.right_morphism, b).ok else "singleton"
        if mode not in ("direct", "singleton"):
            raise ValueError(f"unknown mode {mode!r}")
        self.mode = mode
        self.L = t_of_morphism(adj.left_morphism, tr, tq)
        self._naive = t_of_morphism(adj.right_morphism, tq, tr)
        self.sing = Singletons(tq) if mode == "singleton" else None
        self.D = Functor(tq, tr, self._d_obj, self._d_arr, name=f"Delta({adj.name})")

    def _d_obj(self, f: RelObj) -> RelObj:
        if self.mode == "direct":
            return self._naive.on_obj(f)
        return self._naive.on_obj(self.sing.obj(f))

    def _d_arr(self, v: Rel) -> Rel:
        if self.mode == "direct":
            return self._naive.on_arr(v)
        return self._naive.on_arr(self.sing.arrow(v))

    def unit(self, e: RelObj) -> Rel:
        r = self.adj.r
        a = e.obj
        le = self.L.on_obj(e)
        target = self.D.on_obj(le)
        if self.mode == "direct":
            # η(x, y) = ρ(x, x) ∧ ΔLρ(x, y)
            aa, p1, _ = self.tr.s.two(a, a)
            phi = r.meet(aa, r.reindex(p1, self.tr.support(e)), target.pred)
        else:
            inv = self.sing.counit_inverse(le)
            apa, p1, _ = prod2(self.tr.base, a, inv.cod.obj)
            phi = r.meet(apa, r.reindex(p1, self.tr.support(e)), self.adj.right(apa, inv.phi))
        return Rel(e, target, phi)

    def counit(self, f: RelObj) -> Rel:
        src = self.L.on_obj(self.D.on_obj(f))
        if self.mode == "direct":
            return Rel(src, f, f.pred)
        return self.sing.counit(f, dom=src)

    def counit_inverse(self, f: RelObj) -> Rel:
        src = self.L.on_obj(self.D.on_obj(f))
        if self.mode == "direct":
            return Rel(f, src, f.pred)
        return self.sing.counit_inverse(f, cod=src)


def _admitted(cat: TCategory, f: Rel) -> str | None:
    return cat.violation(f.dom, f.cod, f.phi, check_bound=True)


def topos_adjunction_check(ta: ToposAdjunction, b: Budget = DEFAULT_BUDGET, *, universal: bool = True,
                           full_faithful: bool = True, triangle_cap: int = 64,
                           instance: str = "") -> Certificate:
    """Certify L ⊣ Δ with invertible counit on the enumerated objects.

    Checked: admission and naturality of unit and counit, the triangle at L,
    ε ∘ ε⁻¹ = id and ε⁻¹ ∘ ε = id, the universal-arrow bijection
    hom(LE, F) ≅ hom(E, ΔF), and Δ full and faithful. The triangle at Δ
    is checked when Q(carrier of ΔF) has at most ``triangle_cap`` elements.
    """
    cert = Certificate("topos_adjunction", instance or ta.adj.name, b.to_json())
    cert.witness({"mode": ta.mode})
    tr, tq = ta.tr, ta.tq
    try:
        eobs = tr.objects(b)
        fobs = tq.objects(b)
    except BudgetExhausted as exc:
        return cert.fail(str(exc), EXHAUSTED).done()
    for e in eobs:
        eta = ta.unit(e)
        clause = _admitted(tr, eta)
        if clause is not None:
            return cert.fail({"unit_not_admitted": tr.label(e), "clause": clause}).done()
        le = ta.L.on_obj(e)
        cert.count("triangle_L")
        if tq.compose(ta.counit(le), ta.L.on_arr(eta)) != tq.identity(le):
            return cert.fail({"triangle_L": tr.label(e)}).done()
    for f in fobs:
        df = ta.D.on_obj(f)
        if tr.object_violation(df.obj, df.pred) is not None:
            return cert.fail({"delta_object_invalid": tq.label(f)}).done()
        eps, inv = ta.counit(f), ta.counit_inverse(f)
        for name, arrow in (("counit", eps), ("counit_inverse", inv)):
            clause = _admitted(tq, arrow)
            if clause is not None:
                return cert.fail({f"{name}_not_admitted": tq.label(f), "clause": clause}).done()
        cert.count("counit_iso")
        if tq.compose(eps, inv) != tq.identity(f) or tq.compose(inv, eps) != tq.identity(eps.dom):
            return cert.fail({"counit_not_iso": tq.label(f)}).done()
        if tq.doctrine.fibre_size(df.obj) <= triangle_cap:
            cert.count("triangle_Delta")
            if tr.compose(ta.D.on_arr(eps), ta.unit(df)) != tr.identity(df):
                return cert.fail({"triangle_Delta": tq.label(f)}).done()
        else:
            cert.count("triangle_Delta_beyond_cap")
    for e in eobs:
        for e2 in eobs:
            for u in tr.hom(e, e2):
                cert.count("unit_naturality")
                lhs = tr.compose(ta.unit(e2), u)
                rhs = tr.compose(ta.D.on_arr(ta.L.on_arr(u)), ta.unit(e))
                if lhs != rhs:
                    return cert.fail({"unit_not_natural": tr.label(u)}).done()
    for f in fobs:
        for f2 in fobs:
            homs = tq.hom(f, f2)
            images = set()
            for v in homs:
                cert.count("counit_naturality")
                dv = ta.D.on_arr(v)
                if tq.compose(v, ta.counit(f)) != tq.compose(ta.counit(f2), ta.L.on_arr(dv)):
                    return cert.fail({"counit_not_natural": tq.label(v)}).done()
                images.add(dv)
            if full_faithful:
                cert.count("delta_hom_pairs")
                target = set(tr.hom(ta.D.on_obj(f), ta.D.on_obj(f2)))
                if len(images) != len(homs) or images != target:
                    return cert.fail({"delta_not_full_faithful": [tq.label(f), tq.label(f2)],
                                      "source": len(homs), "target": len(target)}).done()
    if universal:
        for e in eobs:
            le = ta.L.on_obj(e)
            eta = ta.unit(e)
            for f in fobs:
                left = tq.hom(le, f)
                right = tr.hom(e, ta.D.on_obj(f))
                images = {tr.compose(ta.D.on_arr(v), eta) for v in left}
                cert.count("universal_pairs")
                if len(images) != len(left) or images != set(right):
                    return cert.fail({"universal_arrow": [tr.label(e), tq.label(f)],
                                      "left": len(left), "right": len(right)}).done()
    return cert.done()
