"""Finite ordered structures: posets, meet-semilattices, Heyting algebras, frames.

Elements are opaque hashable identifiers; all structure lives in explicit
index tables.  Enumerations follow the input order of ``elems`` so every
derived object is reproducible.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence


class OrderError(ValueError):
    """Raised when an ordered structure violates one of its invariants."""


class FinPoset:
    """A finite partial order given by an explicit ``leq`` table."""

    __slots__ = ("elems", "_index", "_le")

    def __init__(self, elems: Sequence[Hashable], leq: Sequence[Sequence[bool]], *, check: bool = True):
        self.elems = tuple(elems)
        self._index = {x: i for i, x in enumerate(self.elems)}
        if len(self._index) != len(self.elems):
            raise OrderError("element identifiers are not pairwise distinct")
        self._le = tuple(tuple(bool(v) for v in row) for row in leq)
        n = len(self.elems)
        if len(self._le) != n or any(len(row) != n for row in self._le):
            raise OrderError("leq table has the wrong shape")
        if check:
            self._validate()

    @classmethod
    def from_pairs(cls, elems: Sequence[Hashable], pairs: Iterable[tuple[int, int]]) -> "FinPoset":
        """Build from the full relation given as index pairs ``(i, j)`` meaning ``elems[i] <= elems[j]``."""
        n = len(elems)
        table = [[False] * n for _ in range(n)]
        for i, j in pairs:
            table[i][j] = True
        return cls(elems, table)

    @classmethod
    def from_covers(cls, elems: Sequence[Hashable], covers: Iterable[tuple[Hashable, Hashable]]) -> "FinPoset":
        """Reflexive-transitive closure of a generating relation on element ids."""
        elems = tuple(elems)
        idx = {x: i for i, x in enumerate(elems)}
        n = len(elems)
        table = [[i == j for j in range(n)] for i in range(n)]
        for a, b in covers:
            table[idx[a]][idx[b]] = True
        for k in range(n):
            for i in range(n):
                if table[i][k]:
                    row_k = table[k]
                    row_i = table[i]
                    for j in range(n):
                        if row_k[j]:
                            row_i[j] = True
        return cls(elems, table)

    @classmethod
    def from_function(cls, elems: Sequence[Hashable], le: Callable[[Any, Any], bool]) -> "FinPoset":
        elems = tuple(elems)
        return cls(elems, [[le(a, b) for b in elems] for a in elems])

    @classmethod
    def chain(cls, n: int, prefix: str = "c") -> "FinPoset":
        elems = [f"{prefix}{i}" for i in range(n)]
        return cls(elems, [[i <= j for j in range(n)] for i in range(n)])

    def _validate(self) -> None:
        le = self._le
        n = len(self.elems)
        for i in range(n):
            if not le[i][i]:
                raise OrderError(f"leq is not reflexive at {self.elems[i]!r}")
        for i in range(n):
            for j in range(i + 1, n):
                if le[i][j] and le[j][i]:
                    raise OrderError(
                        f"leq is not antisymmetric: {self.elems[i]!r} and {self.elems[j]!r}"
                    )
        for i in range(n):
            for j in range(n):
                if le[i][j]:
                    for k in range(n):
                        if le[j][k] and not le[i][k]:
                            raise OrderError(
                                "leq is not transitive: "
                                f"{self.elems[i]!r} <= {self.elems[j]!r} <= {self.elems[k]!r}"
                            )

    def __len__(self) -> int:
        return len(self.elems)

    def __iter__(self):
        return iter(self.elems)

    def __contains__(self, x) -> bool:
        return x in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, FinPoset) and self.elems == other.elems and self._le == other._le

    def __hash__(self) -> int:
        return hash((self.elems, self._le))

    def __repr__(self) -> str:
        return f"FinPoset({list(self.elems)!r})"

    def index(self, x) -> int:
        return self._index[x]

    def le(self, x, y) -> bool:
        return self._le[self._index[x]][self._index[y]]

    def le_i(self, i: int, j: int) -> bool:
        return self._le[i][j]

    @property
    def table(self) -> tuple[tuple[bool, ...], ...]:
        return self._le

    def pairs(self) -> list[tuple[int, int]]:
        n = len(self.elems)
        return [(i, j) for i in range(n) for j in range(n) if self._le[i][j]]

    def lower_bounds(self, xs: Iterable) -> list:
        xs = [self._index[x] for x in xs]
        return [self.elems[i] for i in range(len(self.elems)) if all(self._le[i][j] for j in xs)]

    def upper_bounds(self, xs: Iterable) -> list:
        xs = [self._index[x] for x in xs]
        return [self.elems[i] for i in range(len(self.elems)) if all(self._le[j][i] for j in xs)]

    def greatest(self, xs: Iterable):
        """Greatest element of ``xs`` or None."""
        xs = list(xs)
        for x in xs:
            if all(self.le(y, x) for y in xs):
                return x
        return None

    def least(self, xs: Iterable):
        xs = list(xs)
        for x in xs:
            if all(self.le(x, y) for y in xs):
                return x
        return None

    def glb(self, xs: Iterable):
        return self.greatest(self.lower_bounds(xs))

    def lub(self, xs: Iterable):
        return self.least(self.upper_bounds(xs))

    @property
    def top(self):
        return self.greatest(self.elems)

    @property
    def bottom(self):
        return self.least(self.elems)

    def maximal(self, xs: Iterable) -> list:
        xs = list(dict.fromkeys(xs))
        return [x for x in xs if not any(y != x and self.le(x, y) for y in xs)]

    def downset(self, x) -> frozenset:
        i = self._index[x]
        return frozenset(self.elems[j] for j in range(len(self.elems)) if self._le[j][i])

    def is_downset(self, xs: Iterable) -> bool:
        s = set(xs)
        return all(y in s for x in s for y in self.downset(x))

    def sub(self, xs: Iterable) -> "FinPoset":
        """Induced sub-poset on ``xs`` (kept in input order of this poset)."""
        keep = set(xs)
        elems = [x for x in self.elems if x in keep]
        return FinPoset.from_function(elems, self.le)

    def to_json(self) -> dict:
        return {"elems": [label(x) for x in self.elems], "leq": [list(p) for p in self.pairs()]}

    @classmethod
    def from_json(cls, data: Mapping) -> "FinPoset":
        elems = list(data["elems"])
        if "leq" in data:
            n = len(elems)
            for p in data["leq"]:
                if len(p) != 2 or not all(isinstance(i, int) and 0 <= i < n for i in p):
                    raise OrderError(f"bad leq pair {p!r}")
            return cls.from_pairs(elems, [tuple(p) for p in data["leq"]])
        if "covers" in data:
            return cls.from_covers(elems, [tuple(p) for p in data["covers"]])
        raise OrderError("poset needs 'leq' or 'covers'")


def label(x) -> str:
    """Stable string label for an element identifier."""
    if isinstance(x, str):
        return x
    if isinstance(x, frozenset):
        return "{" + ",".join(sorted(label(y) for y in x)) + "}"
    if isinstance(x, tuple):
        return "(" + ",".join(label(y) for y in x) + ")"
    return str(x)


@dataclass(frozen=True)
class PreorderPresentation:
    """A reflexive, transitive relation; antisymmetry is not required."""

    elems: tuple
    le: tuple

    def __post_init__(self):
        object.__setattr__(self, "elems", tuple(self.elems))
        object.__setattr__(self, "le", tuple(tuple(bool(v) for v in row) for row in self.le))
        n = len(self.elems)
        if len(set(self.elems)) != n:
            raise OrderError("element identifiers are not pairwise distinct")
        if len(self.le) != n or any(len(r) != n for r in self.le):
            raise OrderError("relation table has the wrong shape")
        for i in range(n):
            if not self.le[i][i]:
                raise OrderError(f"relation is not reflexive at {self.elems[i]!r}")
            for j in range(n):
                if self.le[i][j]:
                    for k in range(n):
                        if self.le[j][k] and not self.le[i][k]:
                            raise OrderError("relation is not transitive")

    @classmethod
    def from_function(cls, elems: Sequence, le: Callable[[Any, Any], bool]) -> "PreorderPresentation":
        elems = tuple(elems)
        return cls(elems, tuple(tuple(le(a, b) for b in elems) for a in elems))


def poset_reflection(p: PreorderPresentation) -> tuple[FinPoset, dict]:
    """Quotient a preorder by mutual comparability.

    Each class is named by its first member in input order; the returned dict
    sends every element to its class name.
    """
    n = len(p.elems)
    rep = [-1] * n
    reps: list[int] = []
    for i in range(n):
        for r in reps:
            if p.le[i][r] and p.le[r][i]:
                rep[i] = r
                break
        else:
            rep[i] = i
            reps.append(i)
    elems = [p.elems[r] for r in reps]
    table = [[p.le[r][s] for s in reps] for r in reps]
    quotient = {p.elems[i]: p.elems[rep[i]] for i in range(n)}
    return FinPoset(elems, table), quotient


@dataclass(frozen=True)
class MonotoneMap:
    dom: FinPoset
    cod: FinPoset
    table: Mapping

    def __post_init__(self):
        table = dict(self.table)
        if set(table) != set(self.dom.elems):
            raise OrderError("monotone map table must cover the domain exactly")
        for v in table.values():
            if v not in self.cod:
                raise OrderError(f"value {v!r} is not in the codomain")
        for x in self.dom.elems:
            for y in self.dom.elems:
                if self.dom.le(x, y) and not self.cod.le(table[x], table[y]):
                    raise OrderError(f"map is not monotone on {x!r} <= {y!r}")
        object.__setattr__(self, "table", table)

    def __call__(self, x):
        return self.table[x]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MonotoneMap)
            and self.dom == other.dom
            and self.cod == other.cod
            and self.table == other.table
        )

    def __hash__(self) -> int:
        return hash((self.dom, self.cod, tuple(self.table[x] for x in self.dom.elems)))

    @classmethod
    def identity(cls, p: FinPoset) -> "MonotoneMap":
        return cls(p, p, {x: x for x in p.elems})

    def compose(self, other: "MonotoneMap") -> "MonotoneMap":
        """``self`` after ``other``."""
        return MonotoneMap(other.dom, self.cod, {x: self.table[other.table[x]] for x in other.dom.elems})


def _meet_table(p: FinPoset) -> list[list[int]] | tuple[int, int]:
    """Binary meet table by index, or the first pair with no meet."""
    n = len(p)
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            lbs = [k for k in range(n) if p.le_i(k, i) and p.le_i(k, j)]
            g = [k for k in lbs if all(p.le_i(m, k) for m in lbs)]
            if not g:
                return (i, j)
            out[i][j] = g[0]
    return out


def _join_table(p: FinPoset) -> list[list[int]] | tuple[int, int]:
    n = len(p)
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            ubs = [k for k in range(n) if p.le_i(i, k) and p.le_i(j, k)]
            g = [k for k in ubs if all(p.le_i(k, m) for m in ubs)]
            if not g:
                return (i, j)
            out[i][j] = g[0]
    return out


class MeetSemilattice:
    """A finite poset with a greatest element and all binary meets."""

    __slots__ = ("poset", "top", "_meet", "_top_i")

    def __init__(self, poset: FinPoset, top, meet: Mapping | None = None):
        self.poset = poset
        if top not in poset:
            raise OrderError(f"top {top!r} not in poset")
        self.top = top
        self._top_i = poset.index(top)
        if not all(poset.le_i(i, self._top_i) for i in range(len(poset))):
            raise OrderError(f"{top!r} is not the greatest element")
        computed = _meet_table(poset)
        if isinstance(computed, tuple):
            i, j = computed
            raise OrderError(f"no meet for {poset.elems[i]!r}, {poset.elems[j]!r}")
        if meet is not None:
            for (x, y), z in dict(meet).items():
                if poset.elems[computed[poset.index(x)][poset.index(y)]] != z:
                    raise OrderError(f"meet({x!r},{y!r}) = {z!r} is not the greatest lower bound")
        self._meet = computed

    @classmethod
    def from_poset(cls, poset: FinPoset) -> "MeetSemilattice":
        top = poset.top
        if top is None:
            raise OrderError("poset has no greatest element")
        return cls(poset, top)

    @property
    def elems(self) -> tuple:
        return self.poset.elems

    def __len__(self) -> int:
        return len(self.poset)

    def le(self, x, y) -> bool:
        return self.poset.le(x, y)

    def meet(self, x, y):
        p = self.poset
        return p.elems[self._meet[p.index(x)][p.index(y)]]

    def meet_i(self, i: int, j: int) -> int:
        return self._meet[i][j]

    @property
    def meet_table(self) -> list[list[int]]:
        return self._meet

    def meet_all(self, xs: Iterable):
        out = self.top
        for x in xs:
            out = self.meet(out, x)
        return out

    def __repr__(self) -> str:
        return f"MeetSemilattice({list(self.elems)!r})"


class HeytingAlgebra:
    """A finite lattice with Heyting implication; ``impl(b, c)`` is max{a : a∧b ≤ c}."""

    __slots__ = ("lattice", "bottom", "_join", "_impl")

    def __init__(self, lattice: MeetSemilattice):
        p = lattice.poset
        bottom = p.bottom
        if bottom is None:
            raise OrderError("no least element")
        joins = _join_table(p)
        if isinstance(joins, tuple):
            i, j = joins
            raise OrderError(f"no join for {p.elems[i]!r}, {p.elems[j]!r}")
        impl = _impl_table(lattice)
        if isinstance(impl, tuple):
            i, j = impl
            raise OrderError(f"no implication {p.elems[i]!r} -> {p.elems[j]!r}")
        self.lattice = lattice
        self.bottom = bottom
        self._join = joins
        self._impl = impl

    @classmethod
    def from_poset(cls, poset: FinPoset) -> "HeytingAlgebra":
        return cls(MeetSemilattice.from_poset(poset))

    @property
    def poset(self) -> FinPoset:
        return self.lattice.poset

    @property
    def elems(self) -> tuple:
        return self.lattice.poset.elems

    @property
    def top(self):
        return self.lattice.top

    def __len__(self) -> int:
        return len(self.lattice)

    def le(self, x, y) -> bool:
        return self.lattice.le(x, y)

    def meet(self, x, y):
        return self.lattice.meet(x, y)

    def join(self, x, y):
        p = self.poset
        return p.elems[self._join[p.index(x)][p.index(y)]]

    def impl(self, x, y):
        p = self.poset
        return p.elems[self._impl[p.index(x)][p.index(y)]]

    def iff(self, x, y):
        return self.meet(self.impl(x, y), self.impl(y, x))

    def join_all(self, xs: Iterable):
        out = self.bottom
        for x in xs:
            out = self.join(out, x)
        return out

    @property
    def join_table(self):
        return self._join

    @property
    def impl_table(self):
        return self._impl

    def __repr__(self) -> str:
        return f"HeytingAlgebra({list(self.elems)!r})"


def _impl_table(s: MeetSemilattice) -> list[list[int]] | tuple[int, int]:
    p = s.poset
    n = len(p)
    m = s.meet_table
    out = [[0] * n for _ in range(n)]
    for b in range(n):
        for c in range(n):
            cands = [a for a in range(n) if p.le_i(m[a][b], c)]
            g = [a for a in cands if all(p.le_i(x, a) for x in cands)]
            if not g:
                return (b, c)
            out[b][c] = g[0]
    return out


class FiniteFrame(HeytingAlgebra):
    """A finite distributive lattice, hence a frame."""

    __slots__ = ()

    def __init__(self, lattice: MeetSemilattice):
        super().__init__(lattice)
        bad = _distributivity_counterexample(self.poset, lattice.meet_table, self._join)
        if bad is not None:
            raise OrderError("not distributive at " + ", ".join(repr(x) for x in bad))

    def __repr__(self) -> str:
        return f"FiniteFrame({list(self.elems)!r})"


def _distributivity_counterexample(p: FinPoset, m, j):
    n = len(p)
    for x in range(n):
        for y in range(n):
            for z in range(n):
                if m[x][j[y][z]] != j[m[x][y]][m[x][z]]:
                    return (p.elems[x], p.elems[y], p.elems[z])
    return None


@dataclass
class StructureReport:
    has_top: bool
    has_bottom: bool
    has_meets: bool
    has_joins: bool
    distributive: bool
    heyting: bool
    frame: bool
    witnesses: dict = field(default_factory=dict)

    def flags(self) -> dict:
        return {
            "has_top": self.has_top,
            "has_bottom": self.has_bottom,
            "has_meets": self.has_meets,
            "has_joins": self.has_joins,
            "distributive": self.distributive,
            "heyting": self.heyting,
            "frame": self.frame,
        }


def detect_structure(p: FinPoset) -> StructureReport:
    w: dict = {}
    top, bottom = p.top, p.bottom
    if top is not None:
        w["top"] = top
    if bottom is not None:
        w["bottom"] = bottom
    meets = _meet_table(p)
    joins = _join_table(p)
    if isinstance(meets, tuple):
        w["missing_meet"] = (p.elems[meets[0]], p.elems[meets[1]])
    if isinstance(joins, tuple):
        w["missing_join"] = (p.elems[joins[0]], p.elems[joins[1]])
    has_meets = not isinstance(meets, tuple)
    has_joins = not isinstance(joins, tuple)
    distributive = False
    if has_meets and has_joins:
        bad = _distributivity_counterexample(p, meets, joins)
        distributive = bad is None
        if bad is not None:
            w["distributivity_counterexample"] = bad
    heyting = False
    if top is not None and has_meets and has_joins and bottom is not None:
        impl = _impl_table(MeetSemilattice(p, top))
        if isinstance(impl, tuple):
            w["missing_impl"] = (p.elems[impl[0]], p.elems[impl[1]])
        else:
            heyting = True
            w["impl"] = {
                (p.elems[b], p.elems[c]): p.elems[impl[b][c]]
                for b in range(len(p))
                for c in range(len(p))
            }
    # finite case: complete lattice + distributive is the frame law
    frame = distributive and top is not None and bottom is not None
    return StructureReport(top is not None, bottom is not None, has_meets, has_joins,
                           distributive, heyting, frame, w)


def downset_completion(s: MeetSemilattice) -> tuple[FiniteFrame, MonotoneMap]:
    """Frame of downward-closed subsets of ``s`` with the principal-downset embedding."""
    p = s.poset
    downs = []
    for r in range(len(p) + 1):
        for combo in itertools.combinations(p.elems, r):
            if p.is_downset(combo):
                downs.append(frozenset(combo))
    poset = FinPoset.from_function(downs, lambda a, b: a <= b)
    frame = FiniteFrame(MeetSemilattice.from_poset(poset))
    embed = MonotoneMap(p, poset, {x: p.downset(x) for x in p.elems})
    return frame, embed


@dataclass(frozen=True)
class SupercompactReport:
    carrier: tuple
    closed_under_meets: bool
    join_generating: bool

    @property
    def supercoherent(self) -> bool:
        return self.closed_under_meets and self.join_generating


def supercompact_elements(l: HeytingAlgebra) -> SupercompactReport:
    """x is supercompact iff x ≤ ⋁S forces x ≤ s for some s in S (S ranges over all subsets)."""
    elems = l.elems
    subsets = []
    for r in range(len(elems) + 1):
        subsets.extend(itertools.combinations(elems, r))
    joins = [(S, l.join_all(S)) for S in subsets]
    carrier = tuple(
        x for x in elems
        if all(any(l.le(x, s) for s in S) for S, j in joins if l.le(x, j))
    )
    cset = set(carrier)
    closed = l.top in cset and all(l.meet(a, b) in cset for a in carrier for b in carrier)
    generating = all(l.join_all(c for c in carrier if l.le(c, x)) == x for x in elems)
    return SupercompactReport(carrier, closed, generating)


def monotone_adjoints(f: MonotoneMap) -> tuple[MonotoneMap | None, MonotoneMap | None]:
    """Left and right Galois adjoints of ``f`` when they exist."""
    dom, cod = f.dom, f.cod
    left_t, right_t = {}, {}
    for a in cod.elems:
        up = [b for b in dom.elems if cod.le(a, f(b))]
        least = dom.least(up)
        if least is None:
            left_t = None
            break
        left_t[a] = least
    for a in cod.elems:
        down = [b for b in dom.elems if cod.le(f(b), a)]
        greatest = dom.greatest(down)
        if greatest is None:
            right_t = None
            break
        right_t[a] = greatest
    left = MonotoneMap(cod, dom, left_t) if left_t is not None else None
    right = MonotoneMap(cod, dom, right_t) if right_t is not None else None
    for a in cod.elems:
        for b in dom.elems:
            if left is not None and cod.le(a, f(b)) != dom.le(left(a), b):
                raise AssertionError("left adjoint search produced a non-adjoint")
            if right is not None and cod.le(f(b), a) != dom.le(b, right(a)):
                raise AssertionError("right adjoint search produced a non-adjoint")
    return left, right


def find_isomorphism(p: FinPoset, q: FinPoset) -> dict | None:
    """An order isomorphism ``p -> q`` by backtracking, or None."""
    if len(p) != len(q):
        return None
    pe, qe = p.elems, q.elems
    n = len(pe)

    def sig(poset, i):
        return (sum(poset.le_i(j, i) for j in range(n)), sum(poset.le_i(i, j) for j in range(n)))

    psig = [sig(p, i) for i in range(n)]
    qsig = [sig(q, i) for i in range(n)]
    assign: list[int] = []
    used = [False] * n

    def extend(i: int) -> bool:
        if i == n:
            return True
        for j in range(n):
            if used[j] or psig[i] != qsig[j]:
                continue
            if all(p.le_i(k, i) == q.le_i(assign[k], j) and p.le_i(i, k) == q.le_i(j, assign[k])
                   for k in range(i)):
                used[j] = True
                assign.append(j)
                if extend(i + 1):
                    return True
                assign.pop()
                used[j] = False
        return False

    if not extend(0):
        return None
    return {pe[i]: qe[assign[i]] for i in range(n)}


def downset_completion_check(s: MeetSemilattice, instance: str = ""):
    """Certify D(S): frame laws, the embedding ↓, and that its image is the supercompact part."""
    from .certificate import Certificate

    cert = Certificate("downset_completion", instance)
    frame, emb = downset_completion(s)
    rep = detect_structure(frame.poset)
    cert.count("elements", len(frame))
    if not (rep.frame and rep.heyting):
        return cert.fail({"frame_laws": rep.witnesses}).done()
    cert.count("frame_laws")
    p = s.poset
    for x in p.elems:
        for y in p.elems:
            if p.le(x, y) != frame.le(emb(x), emb(y)):
                return cert.fail({"not_order_embedding": [label(x), label(y)]}).done()
            if emb(s.meet(x, y)) != frame.meet(emb(x), emb(y)):
                return cert.fail({"meet_not_preserved": [label(x), label(y)]}).done()
            cert.count("embedding_pairs")
    if emb(s.top) != frame.top:
        return cert.fail({"top_not_preserved": label(s.top)}).done()
    sc = supercompact_elements(frame)
    carrier = frame.poset.sub(sc.carrier)
    iso = find_isomorphism(p, carrier)
    if iso is None:
        return cert.fail({"supercompact_carrier": [label(c) for c in sc.carrier]}).done()
    cert.count("supercompact", len(sc.carrier))
    cert.witness({"iso": {label(x): label(v) for x, v in iso.items()},
                  "embedding_is_iso": all(iso[x] == emb(x) for x in p.elems),
                  "closed_under_meets": sc.closed_under_meets, "join_generating": sc.join_generating})
    if not (sc.closed_under_meets and sc.join_generating):
        return cert.fail({"supercoherence": [sc.closed_under_meets, sc.join_generating]}).done()
    return cert.done()
