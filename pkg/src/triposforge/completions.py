"""Category of points G_P, the full existential completion P^∃ and weak subobjects of points."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any

from .certificate import Certificate, jsonable
from .doctrine import (Doctrine, DoctrineMorphism, MissingAdjoint, PointOps, PointwiseDoctrine, WeakSubobjects,
                       check_morphism, identity_base_morphism)
from .fincat import DEFAULT_BUDGET, Budget, BudgetExhausted, EnumCategory
from .order import FinPoset, PreorderPresentation, label, poset_reflection


# ---------------------------------------------------------------------------
# category of points


@dataclass(frozen=True)
class Pt:
    """An object (A, α) of the category of points."""

    obj: Any
    pred: Any

    def to_json(self) -> dict:
        return {"obj": jsonable(self.obj), "pred": jsonable(self.pred)}


@dataclass(frozen=True)
class PtArrow:
    dom: Pt
    cod: Pt
    arrow: Any

    def to_json(self) -> Any:
        return jsonable(self.arrow)


class PointsCategory(EnumCategory):
    """G_P: arrows (A,α) → (B,β) are base arrows f with α ≤ P_f(β)."""

    def __init__(self, p: Doctrine):
        self.doctrine = p
        self.base = p.base
        self.name = f"points({p.name})"
        self._homs: dict = {}

    def __repr__(self) -> str:
        return f"<PointsCategory {self.doctrine.name}>"

    def objects(self, budget: Budget = DEFAULT_BUDGET) -> tuple:
        p = self.doctrine
        out = []
        for a in self.base.objects(budget):
            for x in p.elements(a):
                out.append(Pt(a, x))
            if len(out) > budget.max_objects:
                raise BudgetExhausted(f"more than {budget.max_objects} points")
        return tuple(out)

    def hom(self, x: Pt, y: Pt) -> tuple:
        key = (x, y)
        if key not in self._homs:
            p = self.doctrine
            self._homs[key] = tuple(
                PtArrow(x, y, f) for f in self.base.hom(x.obj, y.obj)
                if p.leq(x.obj, x.pred, p.reindex(f, y.pred)))
        return self._homs[key]

    def admits(self, x: Pt, y: Pt, f) -> bool:
        p = self.doctrine
        return p.leq(x.obj, x.pred, p.reindex(f, y.pred))

    def arrow(self, x: Pt, y: Pt, f) -> PtArrow:
        if not self.admits(x, y, f):
            raise ValueError("base arrow does not respect the predicates")
        return PtArrow(x, y, f)

    def compose(self, g: PtArrow, f: PtArrow) -> PtArrow:
        return PtArrow(f.dom, g.cod, self.base.compose(g.arrow, f.arrow))

    def identity(self, a: Pt) -> PtArrow:
        return PtArrow(a, a, self.base.identity(a.obj))

    def terminal(self) -> Pt:
        t = self.base.terminal()
        return Pt(t, self.doctrine.top(t))

    def to_terminal(self, a: Pt) -> PtArrow:
        return PtArrow(a, self.terminal(), self.base.to_terminal(a.obj))

    def top_point(self, a) -> Pt:
        return Pt(a, self.doctrine.top(a))

    def product(self, x: Pt, y: Pt):
        p, c = self.doctrine, self.base
        ab, p1, p2 = c.product(x.obj, y.obj)
        z = Pt(ab, p.meet(ab, p.reindex(p1, x.pred), p.reindex(p2, y.pred)))
        return z, PtArrow(z, x, p1), PtArrow(z, y, p2)

    def pair(self, f: PtArrow, g: PtArrow) -> PtArrow:
        z, _, _ = self.product(f.cod, g.cod)
        return PtArrow(f.dom, z, self.base.pair(f.arrow, g.arrow))

    def pullback(self, f: PtArrow, g: PtArrow):
        p, c = self.doctrine, self.base
        e, q1, q2 = c.pullback(f.arrow, g.arrow)
        z = Pt(e, p.meet(e, p.reindex(q1, f.dom.pred), p.reindex(q2, g.dom.pred)))
        return z, PtArrow(z, f.dom, q1), PtArrow(z, g.dom, q2)

    def pb_pair(self, f, g, u, v) -> PtArrow:
        z, _, _ = self.pullback(f, g)
        return PtArrow(u.dom, z, self.base.pb_pair(f.arrow, g.arrow, u.arrow, v.arrow))

    def equalizer(self, f: PtArrow, g: PtArrow):
        p, c = self.doctrine, self.base
        e, m = c.equalizer(f.arrow, g.arrow)
        z = Pt(e, p.reindex(m, f.dom.pred))
        return z, PtArrow(z, f.dom, m)

    def label(self, x) -> Any:
        if isinstance(x, Pt):
            return {"obj": self.base.label(x.obj), "pred": self.doctrine.label(x.obj, x.pred)}
        if isinstance(x, PtArrow):
            return self.base.label(x.arrow)
        return jsonable(x)


def points(p: Doctrine) -> PointsCategory:
    return PointsCategory(p)


def forgetful(g: PointsCategory):
    """U: G_P → C, (A, α) ↦ A."""
    from .fincat import Functor
    return Functor(g, g.base, lambda x: x.obj, lambda f: f.arrow, name="U")


def top_inclusion(g: PointsCategory):
    """I: C → G_P, A ↦ (A, ⊤)."""
    from .fincat import Functor
    return Functor(g.base, g, g.top_point, lambda f: PtArrow(g.top_point(g.base.dom(f)), g.top_point(g.base.cod(f)), f),
                   name="I")


# ---------------------------------------------------------------------------
# downsets of a value lattice as bitmasks


class Downsets:
    """All downsets of a finite poset V, as bitmasks over value indices."""

    def __init__(self, values: FinPoset):
        n = len(values)
        self.values = values
        self.n = n
        self.principal = [sum(1 << j for j in range(n) if values.le_i(j, i)) for i in range(n)]
        masks = [m for m in range(1 << n) if all(self.principal[i] & ~m == 0 for i in range(n) if m >> i & 1)]
        masks.sort(key=lambda m: (bin(m).count("1"), m))
        self.masks = masks
        self.index = {m: k for k, m in enumerate(masks)}
        self.below = {m: [d for d in masks if d & ~m == 0] for m in masks}

    def maximal(self, m: int) -> list[int]:
        members = [i for i in range(self.n) if m >> i & 1]
        return [i for i in members if not any(j != i and self.values.le_i(i, j) for j in members)]

    def label(self, m: int) -> tuple:
        return tuple(sorted(label(self.values.elems[i]) for i in self.maximal(m)))

    def poset(self) -> FinPoset:
        labels = [self.label(m) for m in self.masks]
        return FinPoset(labels, [[a & ~b == 0 for b in self.masks] for a in self.masks])


# ---------------------------------------------------------------------------
# full existential completion


class PointwiseCompletion(PointwiseDoctrine):
    """P^∃ of a pointwise doctrine: spans over A reflect to per-point downsets of V.

    A span (f: B → A, β) is sent to a ↦ ↓{β(b) : f(b) = a}; the order of spans
    becomes pointwise inclusion, so the fibre over A is D(V)^A.
    """

    def __init__(self, p: PointwiseDoctrine):
        self.inner = p
        self.ds = Downsets(p.values)
        super().__init__(p.base, self.ds.poset(), f"compex({p.name})")

    def mask(self, k: int) -> int:
        return self.ds.masks[k]

    def from_mask(self, m: int) -> int:
        return self.ds.index[m]

    def classify_span(self, a, f, beta):
        """The fibre element represented by the span (f: B → A, β ∈ P(B))."""
        masks = [0] * len(a)
        pr = self.ds.principal
        for i, j in zip(beta, f.idx):
            masks[j] |= pr[i]
        return tuple(self.from_mask(m) for m in masks)

    def normal_span(self, a, s):
        """(B, f: B → A, β) with B the pairs (point, maximal value)."""
        vals = self.inner.values.elems
        pts = [(x, vals[i]) for x, k in zip(a, s) for i in self.ds.maximal(self.mask(k))]
        b = tuple(pts)
        from .fincat import Fn
        f = Fn(b, a, [a.index(x) for x, _ in pts])
        beta = tuple(self.inner.v.index(v) for _, v in pts)
        return b, f, beta

    def include(self, a, x):
        pr = self.ds.principal
        return tuple(self.from_mask(pr[i]) for i in x)

    def counit(self, a, s):
        _, f, beta = self.normal_span(a, s)
        return self.inner.exists(f, beta)


class SpanCompletion(Doctrine):
    """P^∃ by poset reflection of spans (f: B → A, α ∈ P(B)) over enumerated B."""

    def __init__(self, p: Doctrine, budget: Budget = DEFAULT_BUDGET):
        super().__init__(p.base, f"compex({p.name})")
        self.inner = p
        self.budget = budget
        self._objs = p.base.objects(budget)
        self._fib: dict = {}

    def span_leq(self, s, t) -> bool:
        c, p = self.base, self.inner
        (f, x), (g, y) = s, t
        b = c.dom(f)
        return any(c.compose(g, h) == f and p.leq(b, x, p.reindex(h, y)) for h in c.hom(b, c.dom(g)))

    def _fibre(self, a):
        if a not in self._fib:
            c, p = self.base, self.inner
            spans = [(f, x) for b in self._objs for f in c.hom(b, a) for x in p.elements(b)]
            if len(spans) > 4 * self.budget.max_fibre * max(1, len(self._objs)):
                raise BudgetExhausted("too many spans to reflect")
            poset, quotient = poset_reflection(PreorderPresentation.from_function(spans, self.span_leq))
            self._fib[a] = (poset, quotient)
        return self._fib[a]

    def classify(self, a, f, x):
        poset, quotient = self._fibre(a)
        s = (f, x)
        if s in quotient:
            return quotient[s]
        for r in poset.elems:
            if self.span_leq(s, r) and self.span_leq(r, s):
                return r
        raise BudgetExhausted("span has no representative among enumerated objects")

    def elements(self, a):
        return self._fibre(a)[0].elems

    def leq(self, a, s, t):
        return self._fibre(a)[0].le(s, t)

    def meet(self, a, s, t):
        c, p = self.base, self.inner
        (f, x), (g, y) = s, t
        e, q1, q2 = c.pullback(f, g)
        return self.classify(a, c.compose(f, q1), p.meet(e, p.reindex(q1, x), p.reindex(q2, y)))

    def top(self, a):
        return self.classify(a, self.base.identity(a), self.inner.top(a))

    def reindex(self, u, s):
        c, p = self.base, self.inner
        f, x = s
        _, q1, q2 = c.pullback(u, f)
        return self.classify(c.dom(u), q1, p.reindex(q2, x))

    def exists(self, u, s):
        f, x = s
        return self.classify(self.base.cod(u), self.base.compose(u, f), x)

    def classify_span(self, a, f, x):
        return self.classify(a, f, x)

    def include(self, a, x):
        return self.classify(a, self.base.identity(a), x)

    def counit(self, a, s):
        f, x = s
        return self.inner.exists(f, x)

    def label(self, a, s):
        f, x = s
        c = self.base
        return {"span": c.label(f), "pred": self.inner.label(c.dom(f), x)}


@dataclass
class CanonicalMorphisms:
    inclusion: DoctrineMorphism
    counit: DoctrineMorphism | None
    certificate: Certificate


def canonical_morphisms(pe: Doctrine, b: Budget = DEFAULT_BUDGET) -> CanonicalMorphisms:
    """(id, 𝔦): P → P^∃ and, when P is full existential, (id, 𝔦̄): P^∃ → P, with the adjunction certified."""
    p = pe.inner
    cert = Certificate("canonical_morphisms", pe.name, b.to_json())
    inc = identity_base_morphism(p, pe, pe.include, "inclusion")
    cert.add(check_morphism(inc, b))
    cou = identity_base_morphism(pe, p, pe.counit, "counit")
    try:
        objs = p.base.objects(b)
        for a in objs:
            for x in p.elements(a):
                pe.counit(a, pe.include(a, x))
    except (MissingAdjoint, BudgetExhausted) as exc:
        cert.witness({"counit": "absent", "reason": str(exc)})
        return CanonicalMorphisms(inc, None, cert.done())
    cert.add(check_morphism(cou, b))
    adj = cert.add(Certificate("counit_adjunction", pe.name))
    for a in objs:
        for x in p.elements(a):
            adj.count("counit_iso")
            if not p.eq(a, pe.counit(a, pe.include(a, x)), x):
                adj.fail({"counit_not_iso": [p.base.label(a), p.label(a, x)]})
                break
        for s in pe.elements(a):
            adj.count("unit")
            if not pe.leq(a, s, pe.include(a, pe.counit(a, s))):
                adj.fail({"unit_fails": [p.base.label(a), pe.label(a, s)]})
                break
    adj.done()
    return CanonicalMorphisms(inc, cou, cert.done())


def existential_completion(p: Doctrine, b: Budget = DEFAULT_BUDGET) -> tuple[Doctrine, CanonicalMorphisms]:
    if isinstance(p, PointwiseDoctrine):
        pe = PointwiseCompletion(p)
    else:
        pe = SpanCompletion(p, b)
    return pe, canonical_morphisms(pe, b)


# ---------------------------------------------------------------------------
# weak subobjects of points


class PointsPsi(Doctrine):
    """Ψ of the points of a pointwise doctrine.

    The weak subobject of (A, α) represented by f: (B, β) → (A, α) is
    a ↦ ↓{β(b) : f(b) = a}, a downset inside ↓α(a); elements are tuples of
    bitmasks.
    """

    def __init__(self, g: PointsCategory):
        super().__init__(g, f"weak_subobjects({g.name})")
        p: PointwiseDoctrine = g.doctrine
        self.inner = p
        self.ds = Downsets(p.values)
        self._meet = p.v.meet

    def elements(self, x: Pt):
        ds = self.ds
        return tuple(itertools.product(*(ds.below[ds.principal[i]] for i in x.pred)))

    def fibre_size(self, x: Pt) -> int:
        out = 1
        for i in x.pred:
            out *= len(self.ds.below[self.ds.principal[i]])
        return out

    def elements_below(self, x: Pt, bound):
        return itertools.product(*(self.ds.below[m] for m in bound))

    def leq(self, x, s, t) -> bool:
        for a, b in zip(s, t):
            if a & ~b:
                return False
        return True

    def meet(self, x, s, t):
        return tuple(a & b for a, b in zip(s, t))

    def join(self, x, s, t):
        return tuple(a | b for a, b in zip(s, t))

    def top(self, x: Pt):
        pr = self.ds.principal
        return tuple(pr[i] for i in x.pred)

    def bottom(self, x: Pt):
        return (0,) * len(x.pred)

    def reindex(self, f: PtArrow, s):
        pr = self.ds.principal
        return tuple(s[j] & pr[i] for j, i in zip(f.arrow.idx, f.dom.pred))

    def exists(self, f: PtArrow, s):
        out = [0] * len(f.cod.pred)
        for m, j in zip(s, f.arrow.idx):
            out[j] |= m
        return tuple(out)

    def forall(self, f: PtArrow, t):
        pr, mt, n = self.ds.principal, self._meet, self.ds.n
        out = [pr[i] for i in f.cod.pred]
        for j, (m, ai) in enumerate(zip(t, f.dom.pred)):
            k = f.arrow.idx[j]
            allowed = 0
            for v in range(n):
                if out[k] >> v & 1 and m >> mt[v][ai] & 1:
                    allowed |= 1 << v
            out[k] = allowed
        return tuple(out)

    def implies(self, x: Pt, s, t):
        pr, n = self.ds.principal, self.ds.n
        out = []
        for a, b, ai in zip(s, t, x.pred):
            out.append(sum(1 << v for v in range(n) if pr[ai] >> v & 1 and not (pr[v] & a & ~b)))
        return tuple(out)

    def label(self, x, s):
        return [list(self.ds.label(m)) for m in s]

    def npoints(self, x: Pt) -> int:
        return len(x.obj)

    def pointwise_ops(self):
        below = self.ds.below
        return PointOps(lambda m: below[m], lambda a, b: a & b, lambda a, b: a | b,
                        lambda a, b: not (a & ~b), 0)

    def classifier_candidates(self):
        p = self.inner
        carrier = tuple(self.ds.label(m) for m in self.ds.masks)
        om = Pt(carrier, (p.v.top,) * len(carrier))
        yield om, tuple(self.ds.masks)


def points_weak_subobjects(g: PointsCategory, b: Budget = DEFAULT_BUDGET) -> Doctrine:
    if isinstance(g.doctrine, PointwiseDoctrine):
        return PointsPsi(g)
    return WeakSubobjects(g, b)


def compex_to_psi(pe: Doctrine, psi: Doctrine, a, s):
    """The fibre isomorphism P^∃(A) ≅ Ψ_{G_P}(A, ⊤)."""
    g: PointsCategory = psi.base
    if isinstance(pe, PointwiseCompletion):
        return tuple(pe.mask(k) for k in s)
    f, x = s
    c = g.base
    return psi.classify(g.top_point(a), PtArrow(Pt(c.dom(f), x), g.top_point(a), f))


def psi_to_compex(pe: Doctrine, psi: Doctrine, a, w):
    if isinstance(pe, PointwiseCompletion):
        return tuple(pe.from_mask(m) for m in w)
    return pe.classify(a, w.arrow, w.dom.pred)
