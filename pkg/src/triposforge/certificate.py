"""Structured verification reports emitted by every check."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Any, Iterable

PASS = "pass"
FAIL = "fail"
ABSENT = "absent-at-budget"
EXHAUSTED = "budget-exhausted"

VERDICTS = (PASS, FAIL, ABSENT, EXHAUSTED)
_SEVERITY = {PASS: 0, ABSENT: 1, EXHAUSTED: 2, FAIL: 3}


def worst(verdicts: Iterable[str]) -> str:
    out = PASS
    for v in verdicts:
        if _SEVERITY[v] > _SEVERITY[out]:
            out = v
    return out


def jsonable(x: Any) -> Any:
    """Deterministic JSON-compatible rendering of witness data."""
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    if hasattr(x, "to_json"):
        return x.to_json()
    if isinstance(x, dict):
        items = [(jsonable(k), jsonable(v)) for k, v in x.items()]
        if all(isinstance(k, str) for k, _ in items):
            return {k: v for k, v in items}
        return [[k, v] for k, v in items]
    if isinstance(x, (frozenset, set)):
        return sorted((jsonable(y) for y in x), key=lambda v: json.dumps(v, sort_keys=True))
    if isinstance(x, (list, tuple)):
        return [jsonable(y) for y in x]
    return repr(x)


@dataclass
class Certificate:
    property: str
    instance: str = ""
    budget: dict = field(default_factory=dict)
    verdict: str = PASS
    witnesses: list = field(default_factory=list)
    counterexample: Any = None
    checks: dict = field(default_factory=dict)
    subs: list = field(default_factory=list)
    seed: int | None = None
    timing: float = 0.0
    # "explicit" keeps a verdict decided by the caller (e.g. cross-route consistency)
    verdict_rule: str = "worst"
    _start: float = field(default_factory=time.perf_counter, repr=False, compare=False)

    @property
    def ok(self) -> bool:
        self.sync()
        return self.verdict == PASS

    def sync(self) -> "Certificate":
        """Pull verdicts up from sub-certificates that failed after being attached."""
        for sub in self.subs:
            sub.sync()
            if self.verdict_rule == "explicit":
                continue
            if _SEVERITY[sub.verdict] > _SEVERITY[self.verdict]:
                self.verdict = sub.verdict
                if self.counterexample is None and sub.counterexample is not None:
                    self.counterexample = {"in": sub.property, "counterexample": sub.counterexample}
        return self

    def count(self, name: str, n: int = 1) -> None:
        self.checks[name] = self.checks.get(name, 0) + n

    def fail(self, counterexample: Any, verdict: str = FAIL) -> "Certificate":
        if _SEVERITY[verdict] > _SEVERITY[self.verdict]:
            self.verdict = verdict
        if self.counterexample is None:
            self.counterexample = jsonable(counterexample)
        return self

    def witness(self, w: Any) -> None:
        self.witnesses.append(jsonable(w))

    def add(self, sub: "Certificate") -> "Certificate":
        self.subs.append(sub)
        if _SEVERITY[sub.verdict] > _SEVERITY[self.verdict]:
            self.verdict = sub.verdict
            if self.counterexample is None and sub.counterexample is not None:
                self.counterexample = {"in": sub.property, "counterexample": sub.counterexample}
        return sub

    def done(self) -> "Certificate":
        self.sync()
        self.timing = round(time.perf_counter() - self._start, 6)
        return self

    def to_json(self, timing: bool = True) -> dict:
        self.sync()
        out = {
            "property": self.property,
            "instance": self.instance,
            "budget": self.budget,
            "verdict": self.verdict,
            "witnesses": self.witnesses,
            "counterexample": self.counterexample,
            "checks": dict(sorted(self.checks.items())),
            "subs": [s.to_json(timing) for s in self.subs],
        }
        if self.seed is not None:
            out["seed"] = self.seed
        if self.verdict_rule != "worst":
            out["verdict_rule"] = self.verdict_rule
        if timing:
            out["timing"] = self.timing
        return out

    def canonical(self) -> str:
        """Byte-stable rendering without wall-clock timing."""
        return json.dumps(self.to_json(timing=False), sort_keys=True)

    @classmethod
    def from_json(cls, data: dict) -> "Certificate":
        return cls(
            property=data["property"],
            instance=data.get("instance", ""),
            budget=data.get("budget", {}),
            verdict=data["verdict"],
            witnesses=data.get("witnesses", []),
            counterexample=data.get("counterexample"),
            checks=data.get("checks", {}),
            subs=[cls.from_json(s) for s in data.get("subs", [])],
            seed=data.get("seed"),
            timing=data.get("timing", 0.0),
            verdict_rule=data.get("verdict_rule", "worst"),
        )

    def lines(self, indent: int = 0) -> list[str]:
        self.sync()
        pad = "  " * indent
        head = f"{pad}[{self.verdict}] {self.property}"
        if self.instance:
            head += f" on {self.instance}"
        if self.checks:
            head += " (" + ", ".join(f"{k}={v}" for k, v in sorted(self.checks.items())) + ")"
        out = [head]
        if self.counterexample is not None:
            out.append(f"{pad}  counterexample: {json.dumps(self.counterexample, sort_keys=True)[:400]}")
        for s in self.subs:
            out.extend(s.lines(indent + 1))
        return out
