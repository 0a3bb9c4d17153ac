"""Doctrines as indexed meet-semilattices, their constructors and property detectors.

A doctrine exposes ``elements(A)``, ``leq``, ``meet``, ``top`` and
``reindex(f, b)`` (substitution along ``f: A → B`` of ``b ∈ P(B)``).
Quantifiers and implication have generic fallbacks computed from
materialized fibres; constructors override them with structural formulas,
and the checks below compare the two wherever fibres fit the budget.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Iterable, Mapping, Sequence

from .certificate import ABSENT, EXHAUSTED, Certificate, jsonable
from .fincat import (DEFAULT_BUDGET, Budget, BudgetExhausted, EnumCategory, FinCategory, FinSet, Fn,
                     Slice, SliceArrow)
from .order import (FinPoset, HeytingAlgebra, MeetSemilattice, MonotoneMap, OrderError, PreorderPresentation,
                    _impl_table, _join_table, detect_structure, label, monotone_adjoints, poset_reflection)


class DoctrineError(ValueError):
    pass


class MissingAdjoint(DoctrineError):
    """A quantifier or implication does not exist (or is not computable at budget)."""


# ---------------------------------------------------------------------------
# product plumbing shared by every construction


@lru_cache(maxsize=None)
def prod2(c: EnumCategory, a, b):
    return c.product(a, b)


@lru_cache(maxsize=None)
def prod3(c: EnumCategory, a, b, d):
    """(A×B)×D with its three projections."""
    ab, p1, p2 = c.product(a, b)
    abd, q1, q2 = c.product(ab, d)
    return abd, c.compose(p1, q1), c.compose(p2, q1), q2


@lru_cache(maxsize=None)
def diagonal(c: EnumCategory, a):
    i = c.identity(a)
    return c.pair(i, i)


@lru_cache(maxsize=None)
def swap(c: EnumCategory, a, b):
    """⟨π2, π1⟩ : A×B → B×A."""
    _, p1, p2 = c.product(a, b)
    return c.pair(p2, p1)


class Doctrine:
    """Base class; subclasses provide fibres and reindexing."""

    name = "doctrine"
    cap = DEFAULT_BUDGET.max_fibre

    def __init__(self, base: EnumCategory, name: str):
        self.base = base
        self.name = name
        self._adj_cache: dict = {}
        self._fibre_cache: dict = {}

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"

    # required interface
    def elements(self, a) -> tuple:
        raise NotImplementedError

    def leq(self, a, x, y) -> bool:
        raise NotImplementedError

    def meet(self, a, x, y):
        raise NotImplementedError

    def top(self, a):
        raise NotImplementedError

    def reindex(self, f, y):
        raise NotImplementedError

    # derived helpers
    def label(self, a, x) -> Any:
        return jsonable(x)

    def eq(self, a, x, y) -> bool:
        return self.leq(a, x, y) and self.leq(a, y, x)

    def meet_all(self, a, xs: Iterable):
        out = self.top(a)
        for x in xs:
            out = self.meet(a, out, x)
        return out

    def elements_below(self, a, bound) -> Iterable:
        return [x for x in self.elements(a) if self.leq(a, x, bound)]

    def fibre_size(self, a) -> int:
        return len(self.elements(a))

    def fibre_poset(self, a, cap: int | None = None) -> FinPoset:
        cap = self.cap if cap is None else cap
        key = (a, cap)
        if key not in self._fibre_cache:
            if self.fibre_size(a) > cap:
                raise BudgetExhausted(f"fibre of {self.name} has more than {cap} elements")
            elems = self.elements(a)
            self._fibre_cache[key] = FinPoset(
                elems, [[self.leq(a, x, y) for y in elems] for x in elems], check=False)
        return self._fibre_cache[key]

    def fibre(self, a, cap: int | None = None) -> MeetSemilattice:
        return MeetSemilattice(self.fibre_poset(a, cap), self.top(a))

    def reindex_map(self, f, cap: int | None = None) -> MonotoneMap:
        c = self.base
        dom = self.fibre_poset(c.dom(f), cap)
        cod = self.fibre_poset(c.cod(f), cap)
        return MonotoneMap(cod, dom, {y: self.reindex(f, y) for y in cod.elems})

    def _generic_adjoint(self, f, side: str):
        key = (f, side)
        if key not in self._adj_cache:
            try:
                left, right = monotone_adjoints(self.reindex_map(f))
            except BudgetExhausted as exc:
                raise MissingAdjoint(str(exc)) from exc
            self._adj_cache[(f, "left")] = left
            self._adj_cache[(f, "right")] = right
        adj = self._adj_cache[key]
        if adj is None:
            raise MissingAdjoint(f"no {side} adjoint to reindexing along {f!r}")
        return adj

    # quantifiers and Heyting structure: generic fallbacks
    def exists(self, f, x):
        return self._generic_adjoint(f, "left")(x)

    def forall(self, f, x):
        return self._generic_adjoint(f, "right")(x)

    def implies(self, a, x, y):
        cands = [z for z in self.elements(a) if self.leq(a, self.meet(a, z, x), y)]
        for z in cands:
            if all(self.leq(a, w, z) for w in cands):
                return z
        raise MissingAdjoint("no Heyting implication")

    def iff(self, a, x, y):
        return self.meet(a, self.implies(a, x, y), self.implies(a, y, x))

    def join(self, a, x, y):
        p = self.fibre_poset(a)
        z = p.lub([x, y])
        if z is None:
            raise MissingAdjoint("no binary join")
        return z

    def bottom(self, a):
        z = self.fibre_poset(a).bottom
        if z is None:
            raise MissingAdjoint("no bottom element")
        return z

    # optional hooks used by classifier searches
    def classifier_candidates(self) -> Iterable:
        return ()

    def power_object(self, x):
        """(PX, ∈_X ∈ P(X×PX)) from the first power candidate."""
        for px, member in self.power_candidates(x):
            return px, member
        raise MissingAdjoint(f"no power object candidate for {x!r}")

    def pointwise_ops(self):
        """Per-point value operations when elements over a FinSet product are row-major tuples."""
        return None

    def power_candidates(self, x) -> Iterable:
        return ()


# ---------------------------------------------------------------------------
# pointwise doctrines over FinSet: P(A) = V^A


class ValueLattice:
    """Index tables for a finite poset of truth values."""

    def __init__(self, poset: FinPoset):
        self.poset = poset
        n = len(poset)
        self.n = n
        self.labels = poset.elems
        self.le = [[poset.le_i(i, j) for j in range(n)] for i in range(n)]
        s = MeetSemilattice.from_poset(poset)
        self.top = poset.index(s.top)
        self.meet = s.meet_table
        self.down = [tuple(j for j in range(n) if self.le[j][i]) for i in range(n)]
        report = detect_structure(poset)
        self.report = report
        if report.has_joins and report.has_bottom:
            self.join = _join_table(poset)
            self.bottom = poset.index(poset.bottom)
        else:
            self.join = None
            self.bottom = None
        self.impl = _impl_table(s) if report.heyting else None

    def index(self, x) -> int:
        return self.poset.index(x)


@dataclass(frozen=True)
class PointOps:
    below: Callable
    meet: Callable
    join: Callable
    le: Callable
    bottom: Any


class PointwiseDoctrine(Doctrine):
    """Doctrine over bounded FinSet with P(A) the functions A → V, ordered pointwise.

    Elements are tuples of value indices aligned with the elements of ``A``;
    reindexing is precomposition.
    """

    def __init__(self, base: FinSet, values: FinPoset, name: str):
        if not isinstance(base, FinSet):
            raise DoctrineError("pointwise doctrines live over FinSet")
        super().__init__(base, name)
        self.values = values
        self.v = ValueLattice(values)

    def elements(self, a) -> tuple:
        return tuple(itertools.product(range(self.v.n), repeat=len(a)))

    def fibre_size(self, a) -> int:
        return self.v.n ** len(a)

    def elements_below(self, a, bound):
        return itertools.product(*(self.v.down[i] for i in bound))

    def leq(self, a, x, y) -> bool:
        le = self.v.le
        for i, j in zip(x, y):
            if not le[i][j]:
                return False
        return True

    def meet(self, a, x, y):
        m = self.v.meet
        return tuple(m[i][j] for i, j in zip(x, y))

    def top(self, a):
        return (self.v.top,) * len(a)

    def reindex(self, f: Fn, y):
        return tuple(y[j] for j in f.idx)

    def exists(self, f: Fn, x):
        v = self.v
        if v.join is None:
            return super().exists(f, x)
        out = [v.bottom] * len(f.cod)
        jt = v.join
        for i, j in zip(x, f.idx):
            out[j] = jt[out[j]][i]
        return tuple(out)

    def forall(self, f: Fn, x):
        v = self.v
        out = [v.top] * len(f.cod)
        mt = v.meet
        for i, j in zip(x, f.idx):
            out[j] = mt[out[j]][i]
        return tuple(out)

    def implies(self, a, x, y):
        if self.v.impl is None:
            return super().implies(a, x, y)
        it = self.v.impl
        return tuple(it[i][j] for i, j in zip(x, y))

    def join(self, a, x, y):
        if self.v.join is None:
            return super().join(a, x, y)
        jt = self.v.join
        return tuple(jt[i][j] for i, j in zip(x, y))

    def bottom(self, a):
        if self.v.bottom is None:
            return super().bottom(a)
        return (self.v.bottom,) * len(a)

    def label(self, a, x):
        return [label(self.v.labels[i]) for i in x]

    def from_labels(self, a, labels: Sequence):
        return tuple(self.v.index(lab) for lab in labels)

    def constant(self, a, value):
        return (self.v.index(value),) * len(a)

    def npoints(self, a) -> int:
        return len(a)

    def pointwise_ops(self):
        v = self.v
        if v.join is None:
            return None
        le, mt, jt = v.le, v.meet, v.join
        return PointOps(lambda x: v.down[x], lambda x, y: mt[x][y], lambda x, y: jt[x][y],
                        lambda x, y: le[x][y], v.bottom)

    def omega(self):
        """The carrier of V as a FinSet object with ∈ the identity family."""
        om = tuple(self.v.labels)
        return om, tuple(range(self.v.n))

    def classifier_candidates(self):
        yield self.omega()

    def power_candidates(self, x):
        om, member = self.omega()
        base: FinSet = self.base
        px, ev = base.exponential(x, om)
        yield px, self.reindex(ev, member)


def localic(values: FinPoset | MeetSemilattice | HeytingAlgebra, base: FinSet, name: str = "localic") -> PointwiseDoctrine:
    poset = values if isinstance(values, FinPoset) else values.poset
    return PointwiseDoctrine(base, poset, name)


def trivial_finset(base: FinSet) -> PointwiseDoctrine:
    return PointwiseDoctrine(base, FinPoset(["T"], [[True]]), f"trivial({base.name})")


# ---------------------------------------------------------------------------
# doctrines over presented finite categories


class ExplicitDoctrine(Doctrine):
    """Fibres and reindexing maps given as explicit tables."""

    def __init__(self, base: FinCategory, fibres: Mapping[Any, FinPoset], reindex: Mapping[Any, Mapping],
                 name: str = "explicit"):
        super().__init__(base, name)
        self.fibres = dict(fibres)
        self.tables = {f: dict(t) for f, t in reindex.items()}
        self._sl = {}
        for o in base.objs:
            if o not in self.fibres:
                raise DoctrineError(f"no fibre for object {o!r}")
            try:
                self._sl[o] = MeetSemilattice.from_poset(self.fibres[o])
            except OrderError as exc:
                raise DoctrineError(f"fibre over {o!r} is not a meet-semilattice: {exc}") from exc
        for f in base.arrow_ids:
            if f not in self.tables:
                raise DoctrineError(f"no reindexing table for arrow {f!r}")
            t = self.tables[f]
            dom, cod = self.fibres[base.dom(f)], self.fibres[base.cod(f)]
            if set(t) != set(cod.elems) or not all(v in dom for v in t.values()):
                raise DoctrineError(f"reindexing table for {f!r} does not map P(cod) into P(dom)")

    def elements(self, a) -> tuple:
        return self.fibres[a].elems

    def leq(self, a, x, y) -> bool:
        return self.fibres[a].le(x, y)

    def meet(self, a, x, y):
        return self._sl[a].meet(x, y)

    def top(self, a):
        return self._sl[a].top

    def reindex(self, f, y):
        return self.tables[f][y]

    def to_json(self) -> dict:
        return {
            "fibres": {str(o): p.to_json() for o, p in self.fibres.items()},
            "reindex": {str(f): [[label(k), label(v)] for k, v in t.items()] for f, t in self.tables.items()},
        }


def trivial(c: EnumCategory) -> Doctrine:
    if isinstance(c, FinSet):
        return trivial_finset(c)
    if isinstance(c, FinCategory):
        one = FinPoset(["T"], [[True]])
        return ExplicitDoctrine(c, {o: one for o in c.objs}, {f: {"T": "T"} for f in c.arrow_ids},
                                name=f"trivial({c.name})")
    return TrivialDoctrine(c)


class TrivialDoctrine(Doctrine):
    """Singleton fibres over an arbitrary enumerable base."""

    def __init__(self, c: EnumCategory):
        super().__init__(c, f"trivial({c.name})")

    def elements(self, a):
        return ("T",)

    def leq(self, a, x, y):
        return True

    def meet(self, a, x, y):
        return "T"

    def top(self, a):
        return "T"

    def reindex(self, f, y):
        return "T"

    def exists(self, f, x):
        return "T"

    def forall(self, f, x):
        return "T"

    def implies(self, a, x, y):
        return "T"


class WeakSubobjects(Doctrine):
    """Poset reflection of the slices of a finite base; reindexing by pullback."""

    def __init__(self, c: EnumCategory, budget: Budget = DEFAULT_BUDGET, name: str | None = None):
        super().__init__(c, name or f"weak_subobjects({c.name})")
        self.budget = budget
        self._objs = c.objects(budget)
        self._classes: dict = {}

    def _slice_leq(self, f, g) -> bool:
        c = self.base
        return any(c.compose(g, h) == f for h in c.hom(c.dom(f), c.dom(g)))

    def _fibre(self, a):
        if a not in self._classes:
            c = self.base
            arrows = [f for x in self._objs for f in c.hom(x, a)]
            pre = PreorderPresentation.from_function(arrows, self._slice_leq)
            poset, quotient = poset_reflection(pre)
            self._classes[a] = (poset, quotient)
        return self._classes[a]

    def classify(self, a, f):
        poset, quotient = self._fibre(a)
        if f in quotient:
            return quotient[f]
        for r in poset.elems:
            if self._slice_leq(f, r) and self._slice_leq(r, f):
                return r
        raise BudgetExhausted("arrow has no representative among enumerated objects")

    def elements(self, a):
        return self._fibre(a)[0].elems

    def leq(self, a, x, y):
        return self._fibre(a)[0].le(x, y)

    def meet(self, a, x, y):
        c = self.base
        _, p1, _ = c.pullback(x, y)
        return self.classify(a, c.compose(x, p1))

    def top(self, a):
        return self.classify(a, self.base.identity(a))

    def reindex(self, f, y):
        c = self.base
        _, p1, _ = c.pullback(f, y)
        return self.classify(c.dom(f), p1)

    def exists(self, f, x):
        c = self.base
        return self.classify(c.cod(f), c.compose(f, x))


class Subobjects(WeakSubobjects):
    """Monos up to isomorphism."""

    def __init__(self, c: EnumCategory, budget: Budget = DEFAULT_BUDGET):
        super().__init__(c, budget, name=f"subobjects({c.name})")

    def _fibre(self, a):
        if a not in self._classes:
            c = self.base
            arrows = [f for x in self._objs for f in c.hom(x, a) if c.is_mono(f, self.budget)]
            pre = PreorderPresentation.from_function(arrows, self._slice_leq)
            self._classes[a] = poset_reflection(pre)
        return self._classes[a]

    def exists(self, f, x):
        return Doctrine.exists(self, f, x)


def weak_subobjects(c: EnumCategory, budget: Budget = DEFAULT_BUDGET) -> Doctrine:
    """Ψ_c.  Over FinSet the slices split pointwise (FinSet is extensive), so the
    fibre over A is V^A with V the reflection of the slice over the terminal set."""
    if isinstance(c, FinSet):
        objs = c.objects(budget)
        arrows = [c.to_terminal(x) for x in objs]
        pre = PreorderPresentation.from_function(
            arrows, lambda f, g: any(True for _ in c.hom(f.dom, g.dom)))
        poset, _ = poset_reflection(pre)
        names = ["empty" if len(f.dom) == 0 else "inhabited" for f in poset.elems]
        values = FinPoset(names, [[poset.le(x, y) for y in poset.elems] for x in poset.elems])
        return PointwiseDoctrine(c, values, f"weak_subobjects({c.name})")
    return WeakSubobjects(c, budget)


def subobjects(c: EnumCategory, budget: Budget = DEFAULT_BUDGET) -> Doctrine:
    return Subobjects(c, budget)


# ---------------------------------------------------------------------------
# slice doctrine


class SliceDoctrine(Doctrine):
    """P_{/X}(f: Y → X) = P(Y), over the slice category."""

    def __init__(self, p: Doctrine, x, budget: Budget = DEFAULT_BUDGET):
        super().__init__(Slice(p.base, x), f"slice({p.name})")
        self.inner = p
        self.over = x

    def _d(self, a):
        return self.inner.base.dom(a)

    def elements(self, a):
        return self.inner.elements(self._d(a))

    def fibre_size(self, a):
        return self.inner.fibre_size(self._d(a))

    def elements_below(self, a, bound):
        return self.inner.elements_below(self._d(a), bound)

    def leq(self, a, x, y):
        return self.inner.leq(self._d(a), x, y)

    def meet(self, a, x, y):
        return self.inner.meet(self._d(a), x, y)

    def top(self, a):
        return self.inner.top(self._d(a))

    def reindex(self, f: SliceArrow, y):
        return self.inner.reindex(f.arrow, y)

    def exists(self, f: SliceArrow, x):
        return self.inner.exists(f.arrow, x)

    def forall(self, f: SliceArrow, x):
        return self.inner.forall(f.arrow, x)

    def implies(self, a, x, y):
        return self.inner.implies(self._d(a), x, y)

    def join(self, a, x, y):
        return self.inner.join(self._d(a), x, y)

    def bottom(self, a):
        return self.inner.bottom(self._d(a))

    def label(self, a, x):
        return self.inner.label(self._d(a), x)

    def classifier_candidates(self):
        c = self.inner.base
        for om, member in self.inner.classifier_candidates():
            _, p_om, p_x = c.product(om, self.over)
            yield p_x, self.inner.reindex(p_om, member)


def slice_doctrine(p: Doctrine, x, budget: Budget = DEFAULT_BUDGET) -> SliceDoctrine:
    return SliceDoctrine(p, x, budget)


# ---------------------------------------------------------------------------
# morphisms


@dataclass(frozen=True)
class DoctrineMorphism:
    """(F, 𝔟): F on the bases, ``b(A, x)`` sending P(A) to R(F A)."""

    src: Doctrine
    dst: Doctrine
    on_obj: Callable
    on_arr: Callable
    b: Callable
    name: str = "morphism"


def identity_base_morphism(src: Doctrine, dst: Doctrine, b: Callable, name: str) -> DoctrineMorphism:
    return DoctrineMorphism(src, dst, lambda a: a, lambda f: f, b, name)


def check_morphism(m: DoctrineMorphism, budget: Budget = DEFAULT_BUDGET) -> Certificate:
    """Naturality of 𝔟 and preservation of ⊤ and ∧ on the enumerated fragment."""
    cert = Certificate("doctrine_morphism", m.name, budget.to_json())
    p, r = m.src, m.dst
    c = p.base
    try:
        objs = c.objects(budget)
    except BudgetExhausted as exc:
        return cert.fail(str(exc), EXHAUSTED).done()
    for a in objs:
        fa = m.on_obj(a)
        if not r.eq(fa, m.b(a, p.top(a)), r.top(fa)):
            return cert.fail({"top_not_preserved": c.label(a)}).done()
        els = p.elements(a)
        for x in els:
            for y in els:
                cert.count("meets")
                if not r.eq(fa, m.b(a, p.meet(a, x, y)), r.meet(fa, m.b(a, x), m.b(a, y))):
                    return cert.fail({"meet_not_preserved": [p.label(a, x), p.label(a, y)]}).done()
    for a in objs:
        for b_ in objs:
            for g in c.hom(a, b_):
                for y in p.elements(b_):
                    cert.count("naturality")
                    lhs = m.b(a, p.reindex(g, y))
                    rhs = r.reindex(m.on_arr(g), m.b(b_, y))
                    if not r.eq(m.on_obj(a), lhs, rhs):
                        return cert.fail({"not_natural": [c.label(g), p.label(b_, y)]}).done()
    return cert.done()


# ---------------------------------------------------------------------------
# checks


def _objects(p: Doctrine, budget: Budget, cert: Certificate):
    try:
        return p.base.objects(budget)
    except BudgetExhausted as exc:
        cert.fail(str(exc), EXHAUSTED)
        return None


def validate_doctrine(p: Doctrine, b: Budget = DEFAULT_BUDGET, instance: str = "") -> Certificate:
    cert = Certificate("lex_primary_doctrine", instance or p.name, b.to_json())
    c = p.base
    objs = _objects(p, b, cert)
    if objs is None:
        return cert.done()
    for a in objs:
        if p.fibre_size(a) > b.max_fibre:
            return cert.fail({"fibre_too_large": c.label(a)}, EXHAUSTED).done()
        els = p.elements(a)
        top = p.top(a)
        for x in els:
            if not p.leq(a, x, top):
                return cert.fail({"top_not_greatest": [c.label(a), p.label(a, x)]}).done()
            for y in els:
                m = p.meet(a, x, y)
                cert.count("meets")
                if not (p.leq(a, m, x) and p.leq(a, m, y)):
                    return cert.fail({"meet_not_lower_bound": [p.label(a, x), p.label(a, y)]}).done()
                for z in els:
                    if p.leq(a, z, x) and p.leq(a, z, y) and not p.leq(a, z, m):
                        return cert.fail({"meet_not_greatest": [p.label(a, x), p.label(a, y)]}).done()
    for a in objs:
        ida = c.identity(a)
        for x in p.elements(a):
            if p.reindex(ida, x) != x:
                return cert.fail({"identity": c.label(a), "element": p.label(a, x)}).done()
    homs = {(a, bb): c.hom(a, bb) for a in objs for bb in objs}
    for (a, bb), fs in homs.items():
        ebs = p.elements(bb)
        for f in fs:
            if p.reindex(f, p.top(bb)) != p.top(a) and not p.eq(a, p.reindex(f, p.top(bb)), p.top(a)):
                return cert.fail({"top_not_preserved": c.label(f)}).done()
            for x in ebs:
                for y in ebs:
                    cert.count("reindexed_meets")
                    if not p.eq(a, p.reindex(f, p.meet(bb, x, y)), p.meet(a, p.reindex(f, x), p.reindex(f, y))):
                        return cert.fail({"meet_not_preserved": c.label(f),
                                          "pair": [p.label(bb, x), p.label(bb, y)]}).done()
    for a in objs:
        for bb in objs:
            for f in homs[(a, bb)]:
                for d in objs:
                    for g in homs[(bb, d)]:
                        gf = c.compose(g, f)
                        for z in p.elements(d):
                            cert.count("composable_pairs")
                            if not p.eq(a, p.reindex(gf, z), p.reindex(f, p.reindex(g, z))):
                                return cert.fail({"composable_pair": [c.label(f), c.label(g)],
                                                  "element": p.label(d, z)}).done()
    return cert.done()


@dataclass
class AdjointTables:
    mode: str
    left: dict = field(default_factory=dict)
    right: dict = field(default_factory=dict)


def _mode_arrows(p: Doctrine, objs, mode: str) -> list:
    c = p.base
    if mode == "all":
        return [f for a in objs for b in objs for f in c.hom(a, b)]
    if mode == "projections":
        out = []
        for a in objs:
            for b in objs:
                _, p1, p2 = c.product(a, b)
                out.extend([p1, p2])
        return out
    raise ValueError(f"unknown mode {mode!r}")


def adjoint_check(p: Doctrine, f, side: str, cert: Certificate) -> dict | None:
    """Compute ∃_f (side='left') or ∀_f (side='right') on every element and verify the Galois law."""
    c = p.base
    a, b = c.dom(f), c.cod(f)
    op = p.exists if side == "left" else p.forall
    table = {}
    try:
        for x in p.elements(a):
            table[x] = op(f, x)
    except MissingAdjoint as exc:
        cert.fail({"missing_adjoint": side, "arrow": c.label(f), "reason": str(exc)})
        return None
    ebs = p.elements(b)
    for x, ex in table.items():
        for y in ebs:
            cert.count(f"galois_{side}")
            if side == "left":
                ok = p.leq(b, ex, y) == p.leq(a, x, p.reindex(f, y))
            else:
                ok = p.leq(b, y, ex) == p.leq(a, p.reindex(f, y), x)
            if not ok:
                cert.fail({"not_adjoint": side, "arrow": c.label(f),
                           "pair": [p.label(a, x), p.label(b, y)]})
                return None
    return table


def _cospans(c: EnumCategory, objs, fs):
    for f in fs:
        d = c.cod(f)
        for b in objs:
            for g in c.hom(b, d):
                yield f, g


def existential_structure(p: Doctrine, mode: str = "all", b: Budget = DEFAULT_BUDGET,
                          instance: str = "") -> tuple[AdjointTables, Certificate]:
    cert = Certificate(f"full_existential[{mode}]", instance or p.name, b.to_json())
    tables = AdjointTables(mode)
    c = p.base
    objs = _objects(p, b, cert)
    if objs is None:
        return tables, cert.done()
    arrows = _mode_arrows(p, objs, mode)
    ex = cert.add(Certificate("existence"))
    for f in arrows:
        t = adjoint_check(p, f, "left", ex)
        if t is None:
            break
        tables.left[f] = t
        # compare with the adjoint found by search whenever both fibres fit
        try:
            gen = p._generic_adjoint(f, "left") if Doctrine.exists is not type(p).exists else None
        except MissingAdjoint:
            gen = None
        if gen is not None:
            for x, y in t.items():
                ex.count("search_agreement")
                if not p.eq(c.cod(f), gen(x), y):
                    ex.fail({"structural_vs_search": c.label(f), "element": p.label(c.dom(f), x)})
                    break
    ex.done()
    if not ex.ok:
        return tables, cert.done()
    fr = cert.add(Certificate("frobenius"))
    for f in arrows:
        a, bb = c.dom(f), c.cod(f)
        for x in p.elements(a):
            for y in p.elements(bb):
                fr.count("triples")
                lhs = p.exists(f, p.meet(a, x, p.reindex(f, y)))
                rhs = p.meet(bb, p.exists(f, x), y)
                if not p.eq(bb, lhs, rhs):
                    fr.fail({"arrow": c.label(f), "alpha": p.label(a, x), "beta": p.label(bb, y)})
                    break
            if not fr.ok:
                break
        if not fr.ok:
            break
    fr.done()
    bcc = cert.add(Certificate("beck_chevalley"))
    _bcc(p, objs, arrows, "left", bcc)
    bcc.done()
    return tables, cert.done()


def _bcc(p: Doctrine, objs, arrows, side: str, cert: Certificate) -> None:
    c = p.base
    op = p.exists if side == "left" else p.forall
    for f, g in _cospans(c, objs, arrows):
        _, p1, p2 = c.pullback(f, g)
        for x in p.elements(c.dom(f)):
            cert.count("squares_elements")
            try:
                lhs = p.reindex(g, op(f, x))
                rhs = op(p2, p.reindex(p1, x))
            except MissingAdjoint as exc:
                cert.fail({"missing_adjoint_on_pullback": c.label(p2), "reason": str(exc)})
                return
            if not p.eq(c.dom(g), lhs, rhs):
                cert.fail({"square": [c.label(f), c.label(g)], "alpha": p.label(c.dom(f), x)})
                return


def hyperdoctrine_check(p: Doctrine, b: Budget = DEFAULT_BUDGET, instance: str = "") -> Certificate:
    cert = Certificate("hyperdoctrine", instance or p.name, b.to_json())
    c = p.base
    objs = _objects(p, b, cert)
    if objs is None:
        return cert.done()
    hey = cert.add(Certificate("heyting_fibres"))
    for a in objs:
        try:
            poset = p.fibre_poset(a, b.max_fibre)
        except BudgetExhausted as exc:
            hey.fail({"fibre": c.label(a), "reason": str(exc)}, EXHAUSTED)
            break
        rep = detect_structure(poset)
        hey.count("fibres")
        if not rep.heyting:
            hey.fail({"fibre": c.label(a), "flags": rep.flags(),
                      "witness": jsonable({k: v for k, v in rep.witnesses.items() if k != "impl"})})
            break
        for (x, y), z in rep.witnesses["impl"].items():
            hey.count("implications")
            try:
                got = p.implies(a, x, y)
            except MissingAdjoint as exc:
                hey.fail({"missing_implication": c.label(a), "reason": str(exc)})
                break
            if not p.eq(a, got, z):
                hey.fail({"implication_mismatch": c.label(a), "pair": [p.label(a, x), p.label(a, y)]})
                break
        if not hey.ok:
            break
    hey.done()
    if not hey.ok:
        return cert.done()
    arrows = _mode_arrows(p, objs, "all")
    pres = cert.add(Certificate("reindex_preserves_heyting"))
    for f in arrows:
        a, bb = c.dom(f), c.cod(f)
        els = p.elements(bb)
        if not p.eq(a, p.reindex(f, p.bottom(bb)), p.bottom(a)):
            pres.fail({"bottom_not_preserved": c.label(f)})
            break
        for x in els:
            for y in els:
                pres.count("pairs")
                if not (p.eq(a, p.reindex(f, p.implies(bb, x, y)), p.implies(a, p.reindex(f, x), p.reindex(f, y)))
                        and p.eq(a, p.reindex(f, p.join(bb, x, y)), p.join(a, p.reindex(f, x), p.reindex(f, y)))):
                    pres.fail({"arrow": c.label(f), "pair": [p.label(bb, x), p.label(bb, y)]})
                    break
            if not pres.ok:
                break
        if not pres.ok:
            break
    pres.done()
    for side, nm in (("left", "exists"), ("right", "forall")):
        q = cert.add(Certificate(nm))
        for f in arrows:
            if adjoint_check(p, f, side, q) is None:
                break
        q.done()
        if q.ok:
            bcc = cert.add(Certificate(f"beck_chevalley_{nm}"))
            _bcc(p, objs, arrows, side, bcc)
            bcc.done()
    return cert.done()


def equality_predicate(p: Doctrine, x):
    """δ_X = ∃_{⟨id,id⟩}(⊤_X)."""
    return p.exists(diagonal(p.base, x), p.top(x))


@dataclass
class ClassifierWitness:
    omega: Any
    member: Any
    naming: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"omega": jsonable(self.omega), "member": jsonable(self.member), "named": len(self.naming)}


def _try_classifier(p: Doctrine, om, member, objs, cert: Certificate) -> ClassifierWitness | None:
    c = p.base
    w = ClassifierWitness(om, member)
    for a in objs:
        names = {}
        for u in c.hom(a, om):
            names.setdefault(p.reindex(u, member), u)
        for x in p.elements(a):
            cert.count("predicates")
            hit = names.get(x)
            if hit is None:
                hit = next((u for y, u in names.items() if p.eq(a, y, x)), None)
            if hit is None:
                return None
            w.naming[(a, x)] = hit
    return w


def classifier_search(p: Doctrine, b: Budget = DEFAULT_BUDGET, instance: str = ""):
    cert = Certificate("weak_predicate_classifier", instance or p.name, b.to_json())
    objs = _objects(p, b, cert)
    if objs is None:
        return None, cert.done()
    cands = list(p.classifier_candidates())
    for om in objs:
        if p.fibre_size(om) <= b.max_fibre:
            cands.extend((om, m) for m in p.elements(om))
    for om, member in cands:
        cert.count("candidates")
        w = _try_classifier(p, om, member, objs, cert)
        if w is not None:
            cert.witness(w)
            return w, cert.done()
    return None, cert.fail("no weak predicate classifier within budget", ABSENT).done()


@dataclass
class PowerWitness:
    x: Any
    px: Any
    member: Any
    naming: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"X": jsonable(self.x), "PX_size": len(self.px) if hasattr(self.px, "__len__") else None,
                "named": len(self.naming)}


def _try_power(p: Doctrine, x, px, member, objs, cert: Certificate) -> PowerWitness | None:
    c = p.base
    w = PowerWitness(x, px, member)
    for y in objs:
        xy, q1, q2 = c.product(x, y)
        names = {}
        for u in c.hom(y, px):
            arrow = c.pair(q1, c.compose(u, q2))  # id × u : X×Y → X×PX
            names.setdefault(p.reindex(arrow, member), u)
        for a in p.elements(xy):
            cert.count("predicates")
            hit = names.get(a)
            if hit is None:
                hit = next((u for z, u in names.items() if p.eq(xy, z, a)), None)
            if hit is None:
                return None
            w.naming[(y, a)] = hit
    return w


def power_object_search(p: Doctrine, b: Budget = DEFAULT_BUDGET, instance: str = ""):
    cert = Certificate("weak_power_objects", instance or p.name, b.to_json())
    objs = _objects(p, b, cert)
    if objs is None:
        return None, cert.done()
    c = p.base
    out = {}
    for x in objs:
        cands = list(p.power_candidates(x))
        for px in objs:
            xpx = c.product(x, px)[0]
            if p.fibre_size(xpx) <= b.max_fibre:
                cands.extend((px, m) for m in p.elements(xpx))
        found = None
        for px, member in cands:
            cert.count("candidates")
            found = _try_power(p, x, px, member, objs, cert)
            if found is not None:
                break
        if found is None:
            return None, cert.fail({"no_power_object_for": c.label(x)}, ABSENT).done()
        out[x] = found
    return out, cert.done()


def power_from_classifier(p: Doctrine, w: ClassifierWitness, b: Budget = DEFAULT_BUDGET, instance: str = ""):
    """PA := Ω^A with ∈_A := P_ev(∈); certified like a searched power object."""
    cert = Certificate("power_from_classifier", instance or p.name, b.to_json())
    c = p.base
    if not hasattr(c, "exponential"):
        return None, cert.fail("base is not known to be weakly cartesian closed", ABSENT).done()
    objs = _objects(p, b, cert)
    if objs is None:
        return None, cert.done()
    out = {}
    for x in objs:
        px, ev = c.exponential(x, w.omega)
        member = p.reindex(ev, w.member)
        pw = _try_power(p, x, px, member, objs, cert)
        if pw is None:
            return None, cert.fail({"power_object_fails_for": c.label(x)}).done()
        out[x] = pw
    return out, cert.done()


def check_RC(p: Doctrine, b: Budget = DEFAULT_BUDGET, instance: str = "") -> Certificate:
    cert = Certificate("rule_of_choice", instance or p.name, b.to_json())
    c = p.base
    objs = _objects(p, b, cert)
    if objs is None:
        return cert.done()
    for a in objs:
        ta = p.top(a)
        for bb in objs:
            ab, p1, p2 = c.product(a, bb)
            graphs = [(f, c.pair(c.identity(a), f)) for f in c.hom(a, bb)]
            for x in p.elements(ab):
                try:
                    e = p.exists(p1, x)
                except MissingAdjoint as exc:
                    return cert.fail({"missing_exists": c.label(p1), "reason": str(exc)}).done()
                if not p.leq(a, ta, e):
                    continue
                cert.count("premises")
                if not any(p.leq(a, ta, p.reindex(gr, x)) for _, gr in graphs):
                    return cert.fail({"A": c.label(a), "B": c.label(bb), "alpha": p.label(ab, x)}).done()
    return cert.done()


@dataclass
class ChoiceWitness:
    x: Any
    y: Any
    alpha: Any
    f: Any
    recovers_alpha: bool

    def to_json(self) -> dict:
        return {"X": jsonable(self.x), "Y": jsonable(self.y), "alpha": jsonable(self.alpha),
                "f": jsonable(self.f), "recovers_alpha": self.recovers_alpha}


def check_CA(p: Doctrine, b: Budget = DEFAULT_BUDGET, powers: Mapping | None = None,
             instance: str = "") -> tuple[Certificate, list[ChoiceWitness]]:
    """Comprehension axiom evaluated in P(1) for each enumerated X, Y and α ∈ P(X×Y).

    Also extracts, for each premise, an arrow f: Y → PX with ⊤ ≤ P_{⟨f,id⟩}(γ),
    where γ is the inner formula, and records whether P_{id×f}(∈_X) = α.
    """
    cert = Certificate("comprehension_axiom", instance or p.name, b.to_json())
    witnesses: list[ChoiceWitness] = []
    c = p.base
    objs = _objects(p, b, cert)
    if objs is None:
        return cert.done(), witnesses
    if powers is None:
        w, wc = classifier_search(p, b)
        if w is None:
            cert.add(wc)
            return cert.done(), witnesses
        powers, pc = power_from_classifier(p, w, b)
        if powers is None:
            powers, pc = power_object_search(p, b)
        if powers is None:
            cert.add(pc)
            return cert.done(), witnesses
    one = c.terminal()
    for x in objs:
        pw = powers[x]
        px, member = pw.px, pw.member
        for y in objs:
            xpxy, r1, r2, r3 = prod3(c, x, px, y)
            to_mem = c.pair(r1, r2)
            to_xy = c.pair(r1, r3)
            to_pxy = c.pair(r2, r3)
            pxy, s1, s2 = c.product(px, y)
            xy, t1, t2 = c.product(x, y)
            mem = p.reindex(to_mem, member)
            for alpha in p.elements(xy):
                cert.count("instances")
                try:
                    inner = p.iff(xpxy, mem, p.reindex(to_xy, alpha))
                    gamma = p.forall(to_pxy, inner)
                    val = p.forall(c.to_terminal(y), p.exists(s2, gamma))
                except MissingAdjoint as exc:
                    return cert.fail({"missing_structure": str(exc)}).done(), witnesses
                if not p.leq(one, p.top(one), val):
                    return cert.fail({"X": c.label(x), "Y": c.label(y), "alpha": p.label(xy, alpha)}).done(), witnesses
                ty = p.top(y)
                f_found = None
                for f in c.hom(y, px):
                    if p.leq(y, ty, p.reindex(c.pair(f, c.identity(y)), gamma)):
                        f_found = f
                        break
                if f_found is None:
                    witnesses.append(ChoiceWitness(x, y, p.label(xy, alpha), None, False))
                    continue
                idxf = c.pair(t1, c.compose(f_found, t2))
                back = p.reindex(idxf, member)
                witnesses.append(ChoiceWitness(x, y, p.label(xy, alpha), f_found, p.eq(xy, back, alpha)))
    cert.checks["choice_witnesses"] = sum(1 for w in witnesses if w.f is not None)
    return cert.done(), witnesses
