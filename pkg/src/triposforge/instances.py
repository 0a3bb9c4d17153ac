"""Instance files, the built-in library and the expression language.

Expressions are a prefix language over named structures, e.g.
``T(compex(localic(chain2)))`` or ``presh(trivial(C1))``.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from .completions import existential_completion, points
from .doctrine import (Doctrine, DoctrineError, ExplicitDoctrine, localic, slice_doctrine, subobjects, trivial,
                       weak_subobjects)
from .fincat import DEFAULT_BUDGET, Budget, CategoryError, FinCategory, FinSet
from .order import FiniteFrame, FinPoset, MeetSemilattice, OrderError, downset_completion


class InstanceError(ValueError):
    """A located problem in an instance file or expression."""

    def __init__(self, message: str, stanza: str = "", element: str = ""):
        where = "/".join(x for x in (stanza, element) if x)
        super().__init__(f"{where}: {message}" if where else message)
        self.stanza = stanza
        self.element = element


class UnresolvedReference(InstanceError):
    def __init__(self, name: str, stanza: str = "", element: str = ""):
        super().__init__(f"unresolved reference {name!r}", stanza, element)
        self.name = name


STANZAS = ("posets", "semilattices", "frames", "categories", "doctrines", "budgets")


@dataclass
class InstanceFile:
    posets: dict = field(default_factory=dict)
    semilattices: dict = field(default_factory=dict)
    frames: dict = field(default_factory=dict)
    categories: dict = field(default_factory=dict)
    doctrines: dict = field(default_factory=dict)
    budgets: dict = field(default_factory=dict)
    main: str | None = None

    def to_json(self) -> dict:
        out: dict = {
            "posets": {k: v.to_json() for k, v in sorted(self.posets.items())},
            "semilattices": {k: v.to_json() for k, v in sorted(self.semilattices.items())},
            "frames": {k: v.to_json() for k, v in sorted(self.frames.items())},
            "categories": {k: v.to_json() for k, v in sorted(self.categories.items())},
            "doctrines": {k: dict(v) for k, v in sorted(self.doctrines.items())},
            "budgets": {k: v.to_json() for k, v in sorted(self.budgets.items())},
        }
        if self.main is not None:
            out["main"] = self.main
        return out

    def ordered(self) -> dict:
        """Posets, semilattices and frames in one namespace."""
        return {**self.posets, **self.semilattices, **self.frames}


def _parse_poset(name: str, data: Any, stanza: str = "posets") -> FinPoset:
    if not isinstance(data, Mapping) or "elems" not in data:
        raise InstanceError("poset needs 'elems' and 'leq'", stanza, name)
    elems = data["elems"]
    n = len(elems)
    pairs = []
    for p in data.get("leq", []):
        if len(p) != 2 or not all(isinstance(i, int) and 0 <= i < n for i in p):
            raise InstanceError(f"bad leq pair {p!r}", stanza, name)
        pairs.append(tuple(p))
    try:
        poset = FinPoset.from_pairs(elems, pairs)
        if stanza == "semilattices":
            MeetSemilattice.from_poset(poset)
        elif stanza == "frames":
            FiniteFrame(MeetSemilattice.from_poset(poset))
    except OrderError as exc:
        raise InstanceError(str(exc), stanza, name) from exc
    return poset


def _parse_category(name: str, data: Any, posets: Mapping) -> FinCategory:
    if isinstance(data, Mapping) and "poset" in data:
        ref = data["poset"]
        if ref not in posets:
            raise UnresolvedReference(ref, "categories", name)
        return FinCategory.from_poset(posets[ref], name)
    try:
        return FinCategory.from_json(data, name)
    except (CategoryError, KeyError, TypeError) as exc:
        raise InstanceError(f"invalid category: {exc}", "categories", name) from exc


def _parse_doctrine_entry(name: str, data: Any, posets: Mapping, categories: Mapping) -> dict:
    if not isinstance(data, Mapping) or "kind" not in data:
        raise InstanceError("doctrine needs a 'kind'", "doctrines", name)
    kind = data["kind"]
    if kind == "localic":
        if data.get("values") not in posets:
            raise UnresolvedReference(str(data.get("values")), "doctrines", name)
    elif kind in ("trivial", "subobjects", "weak_subobjects"):
        base = data.get("base")
        if base != "finset" and base not in categories:
            raise UnresolvedReference(str(base), "doctrines", name)
    elif kind == "explicit":
        base = data.get("base")
        if base not in categories:
            raise UnresolvedReference(str(base), "doctrines", name)
        for obj, ref in data.get("fibres", {}).items():
            if ref not in posets:
                raise UnresolvedReference(ref, "doctrines", f"{name}.fibres.{obj}")
    else:
        raise InstanceError(f"unknown doctrine kind {kind!r}", "doctrines", name)
    return dict(data)


def _parse_budget(name: str, data: Any) -> Budget:
    try:
        return Budget(**data)
    except (TypeError, ValueError) as exc:
        raise InstanceError(f"invalid budget: {exc}", "budgets", name) from exc


def loads(text: str) -> InstanceFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, Mapping):
        raise InstanceError("instance file must be a JSON object")
    unknown = set(data) - set(STANZAS) - {"main"}
    if unknown:
        raise InstanceError(f"unknown stanzas {sorted(unknown)}")
    inst = InstanceFile(main=data.get("main"))
    for stanza in ("posets", "semilattices", "frames"):
        for k, v in data.get(stanza, {}).items():
            if k in inst.ordered():
                raise InstanceError("name defined twice", stanza, k)
            getattr(inst, stanza)[k] = _parse_poset(k, v, stanza)
    for k, v in data.get("categories", {}).items():
        inst.categories[k] = _parse_category(k, v, inst.ordered())
    for k, v in data.get("doctrines", {}).items():
        inst.doctrines[k] = _parse_doctrine_entry(k, v, inst.ordered(), inst.categories)
    for k, v in data.get("budgets", {}).items():
        inst.budgets[k] = _parse_budget(k, v)
    # build explicit doctrines eagerly so table errors surface on load
    for k, entry in inst.doctrines.items():
        if entry["kind"] == "explicit":
            build_doctrine(k, entry, inst, FinSet(range(2)))
    return inst


def parse(path: str | Path) -> InstanceFile:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceError(f"cannot read {p}: {exc.strerror}") from exc
    return loads(text)


def dumps(inst: InstanceFile) -> str:
    return json.dumps(inst.to_json(), indent=2, sort_keys=True) + "\n"


def serialize(inst: InstanceFile, path: str | Path) -> None:
    Path(path).write_text(dumps(inst), encoding="utf-8")


def build_doctrine(name: str, entry: Mapping, inst: InstanceFile, finset: FinSet,
                   budget: Budget = DEFAULT_BUDGET) -> Doctrine:
    kind = entry["kind"]
    if kind == "localic":
        return localic(inst.ordered()[entry["values"]], finset, name=f"localic({entry['values']})")
    base = finset if entry["base"] == "finset" else inst.categories[entry["base"]]
    if kind == "trivial":
        d = trivial(base)
    elif kind == "subobjects":
        d = subobjects(base, budget)
    elif kind == "weak_subobjects":
        d = weak_subobjects(base, budget)
    else:
        fibres = {}
        for obj, ref in entry["fibres"].items():
            fibres[obj] = inst.ordered()[ref]
        tables = {f: {k: v for k, v in rows} for f, rows in entry["reindex"].items()}
        try:
            d = ExplicitDoctrine(base, fibres, tables, name=name)
        except DoctrineError as exc:
            raise InstanceError(str(exc), "doctrines", name) from exc
    d.name = name
    return d


# ---------------------------------------------------------------------------
# built-in library


def _diamond() -> FinPoset:
    # ⊤ above a and b, which are above a∧b
    return FinPoset.from_covers(["a&b", "a", "b", "top"], [("a&b", "a"), ("a&b", "b"), ("a", "top"), ("b", "top")])


def _square() -> FinPoset:
    return FinPoset.from_covers(["00", "01", "10", "11"], [("00", "01"), ("00", "10"), ("01", "11"), ("10", "11")])


def library_file() -> InstanceFile:
    """Posets one, chain2, chain3, diamond, square; categories C1, chain2cat, square."""
    inst = InstanceFile()
    inst.posets = {"one": FinPoset(["*"], [[True]]), "chain2": FinPoset.chain(2), "chain3": FinPoset.chain(3),
                   "diamond": _diamond(), "square": _square()}
    inst.categories = {"C1": FinCategory.from_poset(inst.posets["one"], "C1"),
                       "chain2cat": FinCategory.from_poset(inst.posets["chain2"], "chain2cat"),
                       "square": FinCategory.from_poset(inst.posets["square"], "square")}
    return inst


LIBRARY_DOCTRINES = ("trivial(C1)", "trivial(chain2cat)", "trivial(square)",
                     "localic(chain2)", "localic(chain3)", "localic(diamond)")
LIBRARY_LOCALIC = ("localic(chain2)", "localic(chain3)", "localic(diamond)")


def builtin_instance(name: str) -> Path:
    """Path of a packaged instance file such as ``chain2.json``."""
    ref = resources.files("triposforge") / "instances" / name
    if not ref.is_file():
        raise InstanceError(f"no built-in instance {name!r}")
    return Path(str(ref))


# ---------------------------------------------------------------------------
# expressions


_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_\-]*)|(\d+)|(.))")


@dataclass(frozen=True)
class Expr:
    head: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.head
        return f"{self.head}({','.join(str(a) for a in self.args)})"


def parse_expr(text: str) -> Expr:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        pos = m.end()
        if m.group(1) or m.group(2):
            tokens.append(m.group(1) or m.group(2))
        elif m.group(3).strip():
            tokens.append(m.group(3))
    i = 0

    def expr() -> Expr:
        nonlocal i
        if i >= len(tokens) or tokens[i] in "(),":
            raise InstanceError(f"expected a name in {text!r}")
        head = tokens[i]
        i += 1
        args = []
        if i < len(tokens) and tokens[i] == "(":
            i += 1
            args.append(expr())
            while i < len(tokens) and tokens[i] == ",":
                i += 1
                args.append(expr())
            if i >= len(tokens) or tokens[i] != ")":
                raise InstanceError(f"unbalanced parentheses in {text!r}")
            i += 1
        return Expr(head, tuple(args))

    out = expr()
    if i != len(tokens):
        raise InstanceError(f"trailing input in {text!r}")
    return out


class Environment:
    """Evaluates expressions against named structures and a FinSet universe."""

    def __init__(self, inst: InstanceFile | None = None, universe: int = 2, budget: Budget | None = None):
        lib = library_file()
        if inst is not None:
            lib.posets.update(inst.ordered())
            lib.categories.update(inst.categories)
            lib.doctrines.update(inst.doctrines)
            lib.budgets.update(inst.budgets)
            lib.main = inst.main
        self.inst = lib
        self.finset = FinSet(tuple(range(universe)))
        self.budget = budget or Budget(max_set_size=universe)
        self._cache: dict = {}

    def eval(self, e: Expr | str) -> Any:
        if isinstance(e, str):
            e = parse_expr(e)
        key = str(e)
        if key not in self._cache:
            out = self._eval(e)
            if isinstance(out, Doctrine):
                out.name = key
            elif hasattr(out, "name") and not isinstance(out, (FinPoset, FinCategory, FinSet)):
                out.name = key
            self._cache[key] = out
        return self._cache[key]

    def _arity(self, e: Expr, n: int) -> None:
        if len(e.args) != n:
            raise InstanceError(f"{e.head} takes {n} argument(s), got {len(e.args)}")

    def _kind(self, e: Expr, kind: type, what: str):
        v = self.eval(e)
        if not isinstance(v, kind):
            raise InstanceError(f"{e} is not a {what}")
        return v

    def _base(self, e: Expr):
        if e.head == "finset" and not e.args:
            return self.finset
        return self._kind(e, FinCategory, "category")

    def _eval(self, e: Expr) -> Any:
        from .comparison import exlex, presh, reglex
        from .relational import RegCategory, TCategory
        h, inst = e.head, self.inst
        if not e.args:
            if h == "finset":
                return self.finset
            if h in inst.doctrines:
                return build_doctrine(h, inst.doctrines[h], inst, self.finset, self.budget)
            if h in inst.categories:
                return inst.categories[h]
            if h in inst.posets:
                return inst.posets[h]
            if h.isdigit():
                return int(h)
            raise UnresolvedReference(h)
        if h == "localic":
            self._arity(e, 1)
            return localic(self._kind(e.args[0], FinPoset, "poset"), self.finset)
        if h in ("trivial", "sub", "wsub"):
            self._arity(e, 1)
            base = self._base(e.args[0])
            if h == "trivial":
                return trivial(base)
            return (subobjects if h == "sub" else weak_subobjects)(base, self.budget)
        if h == "downsets":
            self._arity(e, 1)
            frame, _ = downset_completion(MeetSemilattice.from_poset(self._kind(e.args[0], FinPoset, "poset")))
            return frame.poset
        if h == "slice":
            self._arity(e, 2)
            p = self._kind(e.args[0], Doctrine, "doctrine")
            x = self._slice_object(p, e.args[1])
            return slice_doctrine(p, x, self.budget)
        if h == "points":
            self._arity(e, 1)
            return points(self._kind(e.args[0], Doctrine, "doctrine"))
        if h == "compex":
            self._arity(e, 1)
            pe, _ = existential_completion(self._kind(e.args[0], Doctrine, "doctrine"), self.budget)
            return pe
        if h == "reg":
            self._arity(e, 1)
            return RegCategory(self._kind(e.args[0], Doctrine, "doctrine"), self.budget)
        if h == "T":
            self._arity(e, 1)
            return TCategory(self._kind(e.args[0], Doctrine, "doctrine"), self.budget)
        if h == "presh":
            self._arity(e, 1)
            return presh(self._kind(e.args[0], Doctrine, "doctrine"), self.budget)
        if h in ("exlex", "reglex"):
            self._arity(e, 1)
            return (exlex if h == "exlex" else reglex)(self._base(e.args[0]), self.budget)
        raise InstanceError(f"unknown constructor {h!r}")

    def _slice_object(self, p: Doctrine, e: Expr):
        c = p.base
        if isinstance(c, FinSet):
            n = self.eval(e)
            if not isinstance(n, int) or n > len(c.universe):
                raise InstanceError(f"slice index {e} must be a set size within the universe")
            return c.universe[:n]
        name = e.head
        if name not in getattr(c, "objs", ()):
            raise UnresolvedReference(name)
        return name

    def main(self) -> Any:
        if self.inst.main is None:
            raise InstanceError("instance file has no 'main' expression")
        return self.eval(self.inst.main)
