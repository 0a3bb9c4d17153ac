"""Finite and budget-enumerable categories.

Every category exposes the same small surface: ``objects(budget)``,
``hom``, ``compose(g, f)`` (g after f), ``identity`` and limit calculators
(``terminal``, ``product``/``pair``, ``pullback``/``pb_pair``,
``equalizer``).  Virtual categories (bounded FinSet, slices, categories of
points, relational completions) implement the same methods.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence

from .certificate import ABSENT, EXHAUSTED, Certificate, jsonable


class CategoryError(ValueError):
    """A presented category violates the category laws."""


class BudgetExhausted(Exception):
    """An enumeration would exceed its budget."""


@dataclass(frozen=True)
class Budget:
    max_objects: int = 64
    max_set_size: int = 2
    max_competitors: int = 500
    max_depth: int = 3
    max_fibre: int = 64

    def __post_init__(self):
        for k, v in self.to_json().items():
            if not isinstance(v, int) or v <= 0:
                raise ValueError(f"budget field {k} must be a positive integer, got {v!r}")

    def to_json(self) -> dict:
        return {
            "max_objects": self.max_objects,
            "max_set_size": self.max_set_size,
            "max_competitors": self.max_competitors,
            "max_depth": self.max_depth,
            "max_fibre": self.max_fibre,
        }


DEFAULT_BUDGET = Budget()


class EnumCategory:
    """Base class for enumerable categories; subclasses override what they support."""

    name = "category"

    def objects(self, budget: Budget) -> tuple:
        raise NotImplementedError

    def hom(self, a, b) -> tuple:
        raise NotImplementedError

    def dom(self, f):
        return f.dom

    def cod(self, f):
        return f.cod

    def compose(self, g, f):
        raise NotImplementedError

    def identity(self, a):
        raise NotImplementedError

    def terminal(self):
        raise NotImplementedError

    def to_terminal(self, a):
        (t,) = self.hom(a, self.terminal())
        return t

    def product(self, a, b):
        """(P, p1, p2)."""
        raise NotImplementedError

    def pair(self, f, g):
        """Mediating arrow into ``product(cod f, cod g)``."""
        raise NotImplementedError

    def pullback(self, f, g):
        """(P, p1, p2) with f∘p1 = g∘p2."""
        raise NotImplementedError

    def pb_pair(self, f, g, u, v):
        """Mediating arrow into ``pullback(f, g)`` for f∘u = g∘v."""
        raise NotImplementedError

    def equalizer(self, f, g):
        raise NotImplementedError

    def wdp_candidates(self, f, g) -> Iterable:
        """Preferred (Z, h) candidates for a weak dependent product of f along g."""
        return ()

    def generic_proof_candidates(self) -> Iterable:
        return ()

    def label(self, x) -> Any:
        return jsonable(x)

    def arrows(self, budget: Budget) -> Iterator:
        obs = self.objects(budget)
        for a in obs:
            for b in obs:
                yield from self.hom(a, b)

    def inverse(self, f):
        """Two-sided inverse of ``f`` found by scanning ``hom(cod f, dom f)``, or None."""
        a, b = self.dom(f), self.cod(f)
        ia, ib = self.identity(a), self.identity(b)
        for g in self.hom(b, a):
            if self.compose(g, f) == ia and self.compose(f, g) == ib:
                return g
        return None

    def is_mono(self, f, budget: Budget) -> bool:
        a = self.dom(f)
        for x in self.objects(budget):
            hs = self.hom(x, a)
            seen = {}
            for u in hs:
                k = self.compose(f, u)
                if k in seen:
                    return False
                seen[k] = u
        return True


# ---------------------------------------------------------------------------
# presented finite categories


class FinCategory(EnumCategory):
    """A category given by explicit objects, arrows and a composition table.

    ``comp`` maps ``(f, g)`` (f then g) to the composite ``g∘f``.
    """

    name = "presented"

    def __init__(self, objects: Sequence, arrows: Sequence[tuple], comp: Mapping[tuple, Any],
                 idents: Mapping | None = None, name: str = "presented"):
        self.name = name
        self.objs = tuple(objects)
        if len(set(self.objs)) != len(self.objs):
            raise CategoryError("duplicate object identifiers")
        self.arrow_ids = tuple(a for a, _, _ in arrows)
        if len(set(self.arrow_ids)) != len(self.arrow_ids):
            raise CategoryError("duplicate arrow identifiers")
        self._dom = {a: d for a, d, _ in arrows}
        self._cod = {a: c for a, _, c in arrows}
        for a in self.arrow_ids:
            if self._dom[a] not in self.objs or self._cod[a] not in self.objs:
                raise CategoryError(f"arrow {a!r} has an unknown endpoint")
        comp = dict(comp)
        if idents is None:
            idents = self._infer_identities(comp)
        self.idents = dict(idents)
        for o in self.objs:
            i = self.idents.get(o)
            if i is None or self._dom.get(i) != o or self._cod.get(i) != o:
                raise CategoryError(f"missing identity for {o!r}")
        for a in self.arrow_ids:
            comp.setdefault((self.idents[self._dom[a]], a), a)
            comp.setdefault((a, self.idents[self._cod[a]]), a)
        self.comp = comp
        self._hom: dict = {}
        for a in self.arrow_ids:
            self._hom.setdefault((self._dom[a], self._cod[a]), []).append(a)
        self._hom = {k: tuple(v) for k, v in self._hom.items()}
        self._validate()
        self._cache: dict = {}

    def _infer_identities(self, comp) -> dict:
        out = {}
        for o in self.objs:
            for a in self.arrow_ids:
                if self._dom[a] != o or self._cod[a] != o:
                    continue
                if all(comp.get((a, f)) == f for f in self.arrow_ids if self._dom[f] == o) and all(
                    comp.get((f, a)) == f for f in self.arrow_ids if self._cod[f] == o
                ):
                    out[o] = a
                    break
        return out

    def _validate(self) -> None:
        for (f, g), h in self.comp.items():
            if f not in self._dom or g not in self._dom or h not in self._dom:
                raise CategoryError(f"composition entry ({f!r},{g!r}) names an unknown arrow")
            if self._cod[f] != self._dom[g]:
                raise CategoryError(f"composition defined on non-composable pair ({f!r},{g!r})")
            if self._dom[h] != self._dom[f] or self._cod[h] != self._cod[g]:
                raise CategoryError(f"composite of ({f!r},{g!r}) has wrong endpoints")
        for f in self.arrow_ids:
            for g in self.arrow_ids:
                if self._cod[f] == self._dom[g] and (f, g) not in self.comp:
                    raise CategoryError(f"composition missing for composable pair ({f!r},{g!r})")
        for f in self.arrow_ids:
            for g in self.arrow_ids:
                if self._cod[f] != self._dom[g]:
                    continue
                fg = self.comp[(f, g)]
                for h in self.arrow_ids:
                    if self._cod[g] != self._dom[h]:
                        continue
                    if self.comp[(fg, h)] != self.comp[(f, self.comp[(g, h)])]:
                        raise CategoryError(f"associativity fails on ({f!r},{g!r},{h!r})")

    @classmethod
    def from_poset(cls, poset, name: str = "poset") -> "FinCategory":
        """The category with one arrow x→y whenever x ≤ y."""
        elems = poset.elems
        arrows = [(f"{x}<={y}", x, y) for x in elems for y in elems if poset.le(x, y)]
        comp = {}
        for x in elems:
            for y in elems:
                for z in elems:
                    if poset.le(x, y) and poset.le(y, z):
                        comp[(f"{x}<={y}", f"{y}<={z}")] = f"{x}<={z}"
        return cls(elems, arrows, comp, {x: f"{x}<={x}" for x in elems}, name=name)

    def to_json(self) -> dict:
        return {
            "objects": list(self.objs),
            "arrows": [{"id": a, "dom": self._dom[a], "cod": self._cod[a]} for a in self.arrow_ids],
            "comp": [[f, g, h] for (f, g), h in sorted(self.comp.items())],
            "idents": dict(self.idents),
        }

    @classmethod
    def from_json(cls, data: Mapping, name: str = "presented") -> "FinCategory":
        arrows = [(a["id"], a["dom"], a["cod"]) for a in data["arrows"]]
        comp = {}
        for row in data["comp"]:
            if len(row) != 3:
                raise CategoryError(f"bad composition row {row!r}")
            f, g, h = row
            comp[(f, g)] = h
        return cls(data["objects"], arrows, comp, data.get("idents"), name=name)

    def __eq__(self, other) -> bool:
        return isinstance(other, FinCategory) and self.to_json() == other.to_json()

    def __hash__(self) -> int:
        return hash((self.objs, self.arrow_ids))

    def __repr__(self) -> str:
        return f"FinCategory({self.name!r})"

    def objects(self, budget: Budget = DEFAULT_BUDGET) -> tuple:
        if len(self.objs) > budget.max_objects:
            raise BudgetExhausted(f"{self.name} has more than {budget.max_objects} objects")
        return self.objs

    def hom(self, a, b) -> tuple:
        return self._hom.get((a, b), ())

    def dom(self, f):
        return self._dom[f]

    def cod(self, f):
        return self._cod[f]

    def compose(self, g, f):
        return self.comp[(f, g)]

    def identity(self, a):
        return self.idents[a]

    # limits by exhaustive universal-property search

    def _memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    def terminal(self):
        def find():
            for t in self.objs:
                if all(len(self.hom(x, t)) == 1 for x in self.objs):
                    return t
            raise CategoryError(f"{self.name} has no terminal object")
        return self._memo(("terminal",), find)

    def product(self, a, b):
        def find():
            for p in self.objs:
                for p1 in self.hom(p, a):
                    for p2 in self.hom(p, b):
                        if self._is_product(p, p1, p2, a, b):
                            return (p, p1, p2)
            raise CategoryError(f"no product of {a!r} and {b!r}")
        return self._memo(("product", a, b), find)

    def _is_product(self, p, p1, p2, a, b) -> bool:
        for x in self.objs:
            for f in self.hom(x, a):
                for g in self.hom(x, b):
                    n = sum(1 for u in self.hom(x, p)
                            if self.compose(p1, u) == f and self.compose(p2, u) == g)
                    if n != 1:
                        return False
        return True

    def pair(self, f, g):
        p, p1, p2 = self.product(self.cod(f), self.cod(g))
        for u in self.hom(self.dom(f), p):
            if self.compose(p1, u) == f and self.compose(p2, u) == g:
                return u
        raise CategoryError("no mediating arrow into product")

    def pullback(self, f, g):
        def find():
            a, b = self.dom(f), self.dom(g)
            for p in self.objs:
                for p1 in self.hom(p, a):
                    for p2 in self.hom(p, b):
                        if self.compose(f, p1) != self.compose(g, p2):
                            continue
                        if self._is_pullback(f, g, p, p1, p2):
                            return (p, p1, p2)
            raise CategoryError(f"no pullback of {f!r} and {g!r}")
        return self._memo(("pullback", f, g), find)

    def _is_pullback(self, f, g, p, p1, p2) -> bool:
        a, b = self.dom(f), self.dom(g)
        for x in self.objs:
            for u in self.hom(x, a):
                for v in self.hom(x, b):
                    if self.compose(f, u) != self.compose(g, v):
                        continue
                    n = sum(1 for m in self.hom(x, p)
                            if self.compose(p1, m) == u and self.compose(p2, m) == v)
                    if n != 1:
                        return False
        return True

    def pb_pair(self, f, g, u, v):
        p, p1, p2 = self.pullback(f, g)
        for m in self.hom(self.dom(u), p):
            if self.compose(p1, m) == u and self.compose(p2, m) == v:
                return m
        raise CategoryError("no mediating arrow into pullback")

    def equalizer(self, f, g):
        def find():
            a = self.dom(f)
            for e_obj in self.objs:
                for e in self.hom(e_obj, a):
                    if self.compose(f, e) != self.compose(g, e):
                        continue
                    ok = True
                    for x in self.objs:
                        for u in self.hom(x, a):
                            if self.compose(f, u) != self.compose(g, u):
                                continue
                            if sum(1 for m in self.hom(x, e_obj) if self.compose(e, m) == u) != 1:
                                ok = False
                                break
                        if not ok:
                            break
                    if ok:
                        return (e_obj, e)
            raise CategoryError("no equalizer")
        return self._memo(("equalizer", f, g), find)


def terminal_category() -> FinCategory:
    return FinCategory(["*"], [("id", "*", "*")], {("id", "id"): "id"}, {"*": "id"}, name="C1")


# ---------------------------------------------------------------------------
# bounded FinSet


class Fn:
    """A function between finite sets; ``idx[i]`` indexes the image of ``dom[i]`` in ``cod``."""

    __slots__ = ("dom", "cod", "idx", "_h")

    def __init__(self, dom: tuple, cod: tuple, idx: Sequence[int]):
        self.dom = dom
        self.cod = cod
        self.idx = tuple(idx)
        self._h = None

    @classmethod
    def from_map(cls, dom: tuple, cod: tuple, mapping: Mapping | Callable) -> "Fn":
        pos = {y: j for j, y in enumerate(cod)}
        get = mapping if callable(mapping) else mapping.__getitem__
        return cls(dom, cod, [pos[get(x)] for x in dom])

    def __call__(self, x):
        return self.cod[self.idx[self.dom.index(x)]]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Fn)
            and self.idx == other.idx
            and self.dom == other.dom
            and self.cod == other.cod
        )

    def __hash__(self) -> int:
        if self._h is None:
            self._h = hash((self.dom, self.cod, self.idx))
        return self._h

    def __repr__(self) -> str:
        return "Fn{" + ", ".join(f"{x!r}->{self.cod[j]!r}" for x, j in zip(self.dom, self.idx)) + "}"

    def items(self):
        return [(x, self.cod[j]) for x, j in zip(self.dom, self.idx)]

    def to_json(self) -> dict:
        return {"dom": jsonable(self.dom), "cod": jsonable(self.cod),
                "map": [jsonable(self.cod[j]) for j in self.idx]}


TERMINAL = ("*",)


@lru_cache(maxsize=None)
def _product(a: tuple, b: tuple):
    p = tuple((x, y) for x in a for y in b)
    nb = len(b)
    p1 = Fn(p, a, [i for i in range(len(a)) for _ in range(nb)])
    p2 = Fn(p, b, [j for _ in range(len(a)) for j in range(nb)])
    return p, p1, p2


@lru_cache(maxsize=None)
def _hom(a: tuple, b: tuple) -> tuple:
    return tuple(Fn(a, b, idx) for idx in itertools.product(range(len(b)), repeat=len(a)))


class FinSet(EnumCategory):
    """Finite sets and all functions.

    Enumerated objects are the subsets of ``universe`` of size at most
    ``budget.max_set_size``; limit constructions may produce sets of pairs,
    which are still objects.
    """

    name = "finset"

    def __init__(self, universe: Sequence):
        universe = tuple(universe)
        if not universe:
            raise ValueError("universe must be nonempty")
        if len(set(universe)) != len(universe):
            raise ValueError("universe has repeated elements")
        self.universe = universe

    def __eq__(self, other) -> bool:
        return isinstance(other, FinSet) and self.universe == other.universe

    def __hash__(self) -> int:
        return hash(("finset", self.universe))

    def __repr__(self) -> str:
        return f"FinSet({list(self.universe)!r})"

    def objects(self, budget: Budget = DEFAULT_BUDGET) -> tuple:
        out = []
        for r in range(min(budget.max_set_size, len(self.universe)) + 1):
            out.extend(itertools.combinations(self.universe, r))
            if len(out) > budget.max_objects:
                raise BudgetExhausted(f"more than {budget.max_objects} subsets of the universe")
        return tuple(out)

    def hom(self, a, b) -> tuple:
        return _hom(a, b)

    def compose(self, g: Fn, f: Fn) -> Fn:
        if f.cod is not g.dom and f.cod != g.dom:
            raise CategoryError("composing non-composable functions")
        gi = g.idx
        return Fn(f.dom, g.cod, [gi[j] for j in f.idx])

    def identity(self, a) -> Fn:
        return Fn(a, a, range(len(a)))

    def terminal(self):
        return TERMINAL

    def to_terminal(self, a) -> Fn:
        return Fn(a, TERMINAL, [0] * len(a))

    def point(self, a, x) -> Fn:
        return Fn(TERMINAL, a, [a.index(x)])

    def product(self, a, b):
        return _product(a, b)

    def pair(self, f: Fn, g: Fn) -> Fn:
        nb = len(g.cod)
        p = _product(f.cod, g.cod)[0]
        return Fn(f.dom, p, [i * nb + j for i, j in zip(f.idx, g.idx)])

    def pullback(self, f: Fn, g: Fn):
        return _pullback(f, g)

    def pb_pair(self, f: Fn, g: Fn, u: Fn, v: Fn) -> Fn:
        p, _, _ = _pullback(f, g)
        pos = {x: i for i, x in enumerate(p)}
        return Fn(u.dom, p, [pos[(u.cod[i], v.cod[j])] for i, j in zip(u.idx, v.idx)])

    def equalizer(self, f: Fn, g: Fn):
        keep = [i for i in range(len(f.dom)) if f.idx[i] == g.idx[i]]
        e = tuple(f.dom[i] for i in keep)
        return e, Fn(e, f.dom, keep)

    def exponential(self, a: tuple, b: tuple):
        """(B^A, ev: A × B^A → B) with functions encoded as tuples of images."""
        fns = tuple(tuple(b[j] for j in idx) for idx in itertools.product(range(len(b)), repeat=len(a)))
        prod, _, _ = _product(a, fns)
        bpos = {y: j for j, y in enumerate(b)}
        ev = Fn(prod, b, [bpos[fn[a.index(x)]] for x, fn in prod])
        return fns, ev

    def powerset(self, a: tuple):
        """(PA, Θ_A ⊆ A × PA membership inclusion)."""
        subsets = tuple(
            tuple(x for x, keep in zip(a, bits) if keep)
            for bits in itertools.product((False, True), repeat=len(a))
        )
        subsets = tuple(sorted(subsets, key=lambda s: (len(s), [a.index(x) for x in s])))
        prod, _, _ = _product(a, subsets)
        theta = tuple((x, s) for x, s in prod if x in s)
        pos = {z: i for i, z in enumerate(prod)}
        return subsets, Fn(theta, prod, [pos[z] for z in theta])

    def dependent_product(self, f: Fn, g: Fn):
        """Sections of ``f`` over each fibre of ``g``: returns (Z, h: Z → I)."""
        x, j_obj, i_obj = f.dom, f.cod, g.cod
        zs = []
        hs = []
        for ii in range(len(i_obj)):
            js = [jj for jj in range(len(j_obj)) if g.idx[jj] == ii]
            choices = [[xx for xx in range(len(x)) if f.idx[xx] == jj] for jj in js]
            for sec in itertools.product(*choices):
                zs.append((i_obj[ii], tuple((j_obj[jj], x[xx]) for jj, xx in zip(js, sec))))
                hs.append(ii)
        z = tuple(zs)
        return z, Fn(z, i_obj, hs)

    def wdp_candidates(self, f, g):
        yield self.dependent_product(f, g)

    def generic_proof_candidates(self):
        # the subset classifier true: 1 → 2, realised with universe points when possible
        if len(self.universe) >= 2:
            one = (self.universe[0],)
            two = (self.universe[0], self.universe[1])
            yield Fn(one, two, [1])


@lru_cache(maxsize=None)
def _pullback(f: Fn, g: Fn):
    pairs = [(i, j) for i in range(len(f.dom)) for j in range(len(g.dom)) if f.idx[i] == g.idx[j]]
    p = tuple((f.dom[i], g.dom[j]) for i, j in pairs)
    return p, Fn(p, f.dom, [i for i, _ in pairs]), Fn(p, g.dom, [j for _, j in pairs])


# ---------------------------------------------------------------------------
# slices


@dataclass(frozen=True)
class SliceArrow:
    dom: Any
    cod: Any
    arrow: Any

    def to_json(self) -> dict:
        return {"slice_arrow": jsonable(self.arrow)}


class Slice(EnumCategory):
    """The slice ``c / x``: objects are arrows into ``x``, morphisms commuting triangles."""

    def __init__(self, c: EnumCategory, x):
        self.base = c
        self.over = x
        self.name = f"slice({c.name})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Slice) and self.base == other.base and self.over == other.over

    def __hash__(self) -> int:
        return hash(("slice", self.base, self.over))

    def objects(self, budget: Budget = DEFAULT_BUDGET) -> tuple:
        out = []
        for y in self.base.objects(budget):
            out.extend(self.base.hom(y, self.over))
            if len(out) > budget.max_objects:
                raise BudgetExhausted("slice has too many objects at this budget")
        return tuple(out)

    def hom(self, a, b) -> tuple:
        c = self.base
        return tuple(SliceArrow(a, b, h) for h in c.hom(c.dom(a), c.dom(b)) if c.compose(b, h) == a)

    def compose(self, g: SliceArrow, f: SliceArrow) -> SliceArrow:
        return SliceArrow(f.dom, g.cod, self.base.compose(g.arrow, f.arrow))

    def identity(self, a) -> SliceArrow:
        return SliceArrow(a, a, self.base.identity(self.base.dom(a)))

    def terminal(self):
        return self.base.identity(self.over)

    def to_terminal(self, a) -> SliceArrow:
        return SliceArrow(a, self.terminal(), a)

    def product(self, a, b):
        c = self.base
        p, p1, p2 = c.pullback(a, b)
        obj = c.compose(a, p1)
        return obj, SliceArrow(obj, a, p1), SliceArrow(obj, b, p2)

    def pair(self, f: SliceArrow, g: SliceArrow) -> SliceArrow:
        c = self.base
        obj, _, _ = self.product(f.cod, g.cod)
        return SliceArrow(f.dom, obj, c.pb_pair(f.cod, g.cod, f.arrow, g.arrow))

    def pullback(self, f: SliceArrow, g: SliceArrow):
        c = self.base
        p, p1, p2 = c.pullback(f.arrow, g.arrow)
        obj = c.compose(f.dom, p1)
        return obj, SliceArrow(obj, f.dom, p1), SliceArrow(obj, g.dom, p2)

    def pb_pair(self, f, g, u, v) -> SliceArrow:
        obj, _, _ = self.pullback(f, g)
        return SliceArrow(u.dom, obj, self.base.pb_pair(f.arrow, g.arrow, u.arrow, v.arrow))

    def equalizer(self, f: SliceArrow, g: SliceArrow):
        c = self.base
        e, m = c.equalizer(f.arrow, g.arrow)
        obj = c.compose(f.dom, m)
        return obj, SliceArrow(obj, f.dom, m)

    def wdp_candidates(self, f: SliceArrow, g: SliceArrow):
        c = self.base
        for z, h in c.wdp_candidates(f.arrow, g.arrow):
            obj = c.compose(g.cod, h)
            yield obj, SliceArrow(obj, g.cod, h)

    def generic_proof_candidates(self):
        for theta in self.base.generic_proof_candidates():
            yield slice_generic_proof(self, theta)


def slice_generic_proof(s: Slice, theta) -> SliceArrow:
    """From θ: Θ → Λ in the base, the slice arrow θ × id_X over the projections to X."""
    c = s.base
    x = s.over
    th_dom, th_cod = c.dom(theta), c.cod(theta)
    _, a1, q_dom = c.product(th_dom, x)
    _, _, q_cod = c.product(th_cod, x)
    arrow = c.pair(c.compose(theta, a1), q_dom)
    return SliceArrow(q_dom, q_cod, arrow)


# ---------------------------------------------------------------------------
# functors and equivalences


@dataclass(frozen=True)
class Functor:
    dom: EnumCategory
    cod: EnumCategory
    on_obj: Callable
    on_arr: Callable
    name: str = "F"


def identity_functor(c: EnumCategory) -> Functor:
    return Functor(c, c, lambda a: a, lambda f: f, name="id")


def check_functor_laws(f: Functor, objects: Sequence, cert: Certificate) -> None:
    c, d = f.dom, f.cod
    for a in objects:
        cert.count("identities")
        if f.on_arr(c.identity(a)) != d.identity(f.on_obj(a)):
            cert.fail({"identity_not_preserved": c.label(a)})
            return
    for a in objects:
        for b in objects:
            for u in c.hom(a, b):
                for cc in objects:
                    for v in c.hom(b, cc):
                        cert.count("composites")
                        if f.on_arr(c.compose(v, u)) != d.compose(f.on_arr(v), f.on_arr(u)):
                            cert.fail({"composite_not_preserved": [c.label(u), c.label(v)]})
                            return


def equivalence_check(f: Functor, b: Budget = DEFAULT_BUDGET, *, dom_objects: Sequence | None = None,
                      cod_objects: Sequence | None = None, eso: Callable | None = None,
                      instance: str = "", laws: bool = False) -> Certificate:
    """Faithful, full and essentially surjective at budget.

    ``eso`` maps a codomain object to ``(domain object, iso, inverse)`` using a
    known construction; otherwise isomorphisms are searched blindly.
    """
    cert = Certificate("equivalence", instance, b.to_json())
    c, d = f.dom, f.cod
    try:
        dobs = tuple(dom_objects) if dom_objects is not None else c.objects(b)
        cobs = tuple(cod_objects) if cod_objects is not None else d.objects(b)
    except BudgetExhausted as exc:
        return cert.fail(str(exc), EXHAUSTED).done()
    if laws:
        law = cert.add(Certificate("functor_laws", instance))
        check_functor_laws(f, dobs, law)
        law.done()
    faithful = full = True
    for a in dobs:
        fa = f.on_obj(a)
        for a2 in dobs:
            fa2 = f.on_obj(a2)
            src = c.hom(a, a2)
            images = {}
            for u in src:
                cert.count("arrows")
                fu = f.on_arr(u)
                if fu in images and faithful:
                    faithful = False
                    cert.fail({"not_faithful": [c.label(images[fu]), c.label(u)]})
                images[fu] = u
            if full:
                for v in d.hom(fa, fa2):
                    if v not in images:
                        full = False
                        cert.fail({"not_full": {"dom": d.label(fa), "cod": d.label(fa2), "missing": d.label(v)}})
                        break
    cert.checks["faithful"] = int(faithful)
    cert.checks["full"] = int(full)
    eso_ok = True
    for y in cobs:
        cert.count("eso_objects")
        found = None
        if eso is not None:
            found = eso(y)
            if found is not None:
                x, iso, inv = found
                fx = f.on_obj(x)
                if not (d.compose(inv, iso) == d.identity(d.dom(iso))
                        and d.compose(iso, inv) == d.identity(d.cod(iso))
                        and {d.dom(iso), d.cod(iso)} == {fx, y}):
                    found = None
        else:
            for x in dobs:
                fx = f.on_obj(x)
                for iso in d.hom(fx, y):
                    inv = d.inverse(iso)
                    if inv is not None:
                        found = (x, iso, inv)
                        break
                if found:
                    break
        if found is None:
            eso_ok = False
            cert.fail({"not_essentially_surjective": d.label(y)})
            break
    cert.checks["essentially_surjective"] = int(eso_ok)
    if cert.ok:
        cert.witness("equivalence at budget")
    return cert.done()


# ---------------------------------------------------------------------------
# limit certificates


def certify_product(c: EnumCategory, a, b, budget: Budget = DEFAULT_BUDGET) -> Certificate:
    cert = Certificate("product", budget=budget.to_json())
    p, p1, p2 = c.product(a, b)
    for x in c.objects(budget):
        for f in c.hom(x, a):
            for g in c.hom(x, b):
                cert.count("cones")
                meds = [u for u in c.hom(x, p) if c.compose(p1, u) == f and c.compose(p2, u) == g]
                if len(meds) != 1:
                    return cert.fail({"cone": [c.label(f), c.label(g)], "mediators": len(meds)}).done()
    return cert.done()


def certify_pullback(c: EnumCategory, f, g, budget: Budget = DEFAULT_BUDGET) -> Certificate:
    cert = Certificate("pullback", budget=budget.to_json())
    p, p1, p2 = c.pullback(f, g)
    if c.compose(f, p1) != c.compose(g, p2):
        return cert.fail("square does not commute").done()
    a, b = c.dom(f), c.dom(g)
    for x in c.objects(budget):
        for u in c.hom(x, a):
            for v in c.hom(x, b):
                if c.compose(f, u) != c.compose(g, v):
                    continue
                cert.count("cones")
                meds = [m for m in c.hom(x, p) if c.compose(p1, m) == u and c.compose(p2, m) == v]
                if len(meds) != 1:
                    return cert.fail({"cone": [c.label(u), c.label(v)], "mediators": len(meds)}).done()
    return cert.done()


def certify_terminal(c: EnumCategory, budget: Budget = DEFAULT_BUDGET) -> Certificate:
    cert = Certificate("terminal", budget=budget.to_json())
    t = c.terminal()
    for x in c.objects(budget):
        cert.count("objects")
        if len(c.hom(x, t)) != 1:
            return cert.fail({"object": c.label(x), "arrows": len(c.hom(x, t))}).done()
    return cert.done()


def certify_equalizer(c: EnumCategory, f, g, budget: Budget = DEFAULT_BUDGET) -> Certificate:
    cert = Certificate("equalizer", budget=budget.to_json())
    e_obj, e = c.equalizer(f, g)
    if c.compose(f, e) != c.compose(g, e):
        return cert.fail("equalizer does not equalize").done()
    a = c.dom(f)
    for x in c.objects(budget):
        for u in c.hom(x, a):
            if c.compose(f, u) != c.compose(g, u):
                continue
            cert.count("cones")
            meds = [m for m in c.hom(x, e_obj) if c.compose(e, m) == u]
            if len(meds) != 1:
                return cert.fail({"cone": c.label(u), "mediators": len(meds)}).done()
    return cert.done()


# ---------------------------------------------------------------------------
# weak dependent products


@dataclass(frozen=True)
class WDPDiagram:
    """h: Z → I, the pullback E of g along h with legs q1: E → J, q2: E → Z, and e: E → X."""

    z: Any
    h: Any
    e_obj: Any
    q1: Any
    q2: Any
    e: Any

    def to_json(self) -> dict:
        return {"Z": jsonable(self.z), "h": jsonable(self.h), "e": jsonable(self.e)}


def wdp_diagrams(c: EnumCategory, f, g, z, h) -> Iterator[WDPDiagram]:
    """All diagrams over the given (Z, h): every e: E → X with f∘e = q1."""
    e_obj, q1, q2 = c.pullback(g, h)
    for e in c.hom(e_obj, c.dom(f)):
        if c.compose(f, e) == q1:
            yield WDPDiagram(z, h, e_obj, q1, q2, e)


def wdp_competitors(c: EnumCategory, f, g, budget: Budget) -> list[WDPDiagram]:
    i_obj = c.cod(g)
    out = []
    for z in c.objects(budget):
        for h in c.hom(z, i_obj):
            for d in wdp_diagrams(c, f, g, z, h):
                out.append(d)
                if len(out) > budget.max_competitors:
                    raise BudgetExhausted(f"more than {budget.max_competitors} competitor diagrams")
    return out


def mediates(c: EnumCategory, d: WDPDiagram, other: WDPDiagram):
    """(w, k) with h∘w = h' and e∘k = e', or None."""
    w_found = None
    for w in c.hom(other.z, d.z):
        if c.compose(d.h, w) == other.h:
            w_found = w
            break
    if w_found is None:
        return None
    for k in c.hom(other.e_obj, d.e_obj):
        if c.compose(d.e, k) == other.e:
            return (w_found, k)
    return None


def weak_dependent_product(c: EnumCategory, f, g, b: Budget = DEFAULT_BUDGET,
                           candidates: Iterable | None = None, instance: str = ""):
    """Search a weakly terminal diagram; returns (diagram or None, certificate)."""
    cert = Certificate("weak_dependent_product", instance, b.to_json())
    if c.cod(f) != c.dom(g):
        raise CategoryError("weak dependent product needs cod(f) = dom(g)")
    try:
        competitors = wdp_competitors(c, f, g, b)
    except BudgetExhausted as exc:
        return None, cert.fail(str(exc), EXHAUSTED).done()
    cert.checks["competitors"] = len(competitors)
    pool = list(candidates) if candidates is not None else list(c.wdp_candidates(f, g))
    tried = []
    for z, h in pool:
        tried.extend(wdp_diagrams(c, f, g, z, h))
    tried.extend(competitors)
    for d in tried:
        cert.count("candidates")
        if all(mediates(c, d, o) is not None for o in competitors):
            cert.witness(d)
            return d, cert.done()
    return None, cert.fail("no weakly terminal diagram within budget", ABSENT).done()


def check_weakly_terminal(c: EnumCategory, d: WDPDiagram, competitors: Sequence[WDPDiagram],
                          cert: Certificate) -> bool:
    for o in competitors:
        cert.count("competitors")
        if mediates(c, d, o) is None:
            cert.fail({"undominated_competitor": o})
            return False
    return True


# ---------------------------------------------------------------------------
# generic proofs


def generic_proof_factorization(c: EnumCategory, theta, f):
    """(υ, pullback legs, e1, e2) exhibiting f and υ*θ as mutually factoring over cod f."""
    x, y = c.cod(f), c.dom(f)
    lam = c.cod(theta)
    for u in c.hom(x, lam):
        p, p1, _ = c.pullback(u, theta)
        e1 = next((a for a in c.hom(p, y) if c.compose(f, a) == p1), None)
        if e1 is None:
            continue
        e2 = next((a for a in c.hom(y, p) if c.compose(p1, a) == f), None)
        if e2 is None:
            continue
        return u, p, e1, e2
    return None


def generic_proof_search(c: EnumCategory, b: Budget = DEFAULT_BUDGET,
                         candidates: Iterable | None = None, instance: str = ""):
    cert = Certificate("generic_proof", instance, b.to_json())
    try:
        arrows = list(c.arrows(b))
    except BudgetExhausted as exc:
        return None, cert.fail(str(exc), EXHAUSTED).done()
    pool = list(candidates) if candidates is not None else list(c.generic_proof_candidates())
    pool.extend(arrows)
    for theta in pool:
        cert.count("candidates")
        if all(generic_proof_factorization(c, theta, f) is not None for f in arrows):
            cert.checks["arrows"] = len(arrows)
            cert.witness({"theta": c.label(theta)})
            return theta, cert.done()
    return None, cert.fail("no generic proof within budget", ABSENT).done()
