"""Command line workbench: ``tripos-forge <command> <expr|path> [options]``.

Exit codes: 0 when every certificate passes, 1 on any failure, 2 on usage or
input errors, 3 when something is absent at budget, 4 when a budget ran out.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable

from .certificate import ABSENT, EXHAUSTED, FAIL, PASS, Certificate, worst
from .completions import PointsCategory, existential_completion
from .doctrine import (Doctrine, PointwiseDoctrine, check_CA, check_RC, classifier_search, existential_structure,
                       hyperdoctrine_check, power_object_search, validate_doctrine)
from .fincat import Budget, BudgetExhausted, EnumCategory, generic_proof_search
from .instances import (LIBRARY_DOCTRINES, Environment, InstanceError, builtin_instance, library_file, parse)
from .order import FinPoset, MeetSemilattice, OrderError, downset_completion, downset_completion_check, find_isomorphism
from .relational import RelCategory, category_laws

EXIT_CODES = {PASS: 0, FAIL: 1, ABSENT: 3, EXHAUSTED: 4}
USAGE_ERROR = 2
DEFAULT_UNIVERSE = 2
DEFAULT_SAMPLE = 200


class UsageError(Exception):
    pass


def _need(obj, kind: type, what: str, expr: str):
    if not isinstance(obj, kind):
        raise UsageError(f"{expr} is not a {what}")
    return obj


# ---------------------------------------------------------------------------
# check


def _poset_check(obj, b, seed, expr):
    poset = _need(obj, FinPoset, "poset", expr)
    try:
        s = MeetSemilattice.from_poset(poset)
    except OrderError as exc:
        c = Certificate("downset_completion", expr)
        return c.fail({"not_a_meet_semilattice": str(exc)}).done()
    return downset_completion_check(s, expr)


def _doctrine_check(fn: Callable) -> Callable:
    def run(obj, b, seed, expr):
        return fn(_need(obj, Doctrine, "doctrine", expr), b, expr)
    return run


def _second(fn: Callable) -> Callable:
    def run(p, b, expr):
        return fn(p, b, instance=expr)[1]
    return run


def _first(fn: Callable) -> Callable:
    def run(p, b, expr):
        return fn(p, b, instance=expr)[0]
    return run


def _generic_proof(obj, b, seed, expr):
    c = obj.base if isinstance(obj, Doctrine) else _need(obj, EnumCategory, "category or doctrine", expr)
    return generic_proof_search(c, b, instance=expr)[1]


def _category_laws(obj, b, seed, expr):
    cat = _need(obj, RelCategory, "Reg/T category", expr)
    c = category_laws(cat, b, sample=DEFAULT_SAMPLE, seed=seed, instance=expr)
    c.seed = seed
    return c


def _supercompact(p, b, expr):
    from .supercompact import supercompactifiable_check
    return supercompactifiable_check(p, b, instance=expr)


def _points_wdp(p, b, expr):
    from .supercompact import points_wdp_all
    c = points_wdp_all(p, b)
    c.instance = expr
    return c


def _points_gp(p, b, expr):
    from .supercompact import points_generic_proof
    c = points_generic_proof(p, b)[1]
    c.instance = expr
    return c


def _sheafification(obj, b, seed, expr):
    from .sheaf import SheafError, sheafify
    p = _need(obj, Doctrine, "doctrine", expr)
    try:
        c = sheafify(p, b, seed=seed)
    except SheafError as exc:
        return Certificate("sheafification", expr).fail({"precondition": str(exc)}, ABSENT).done()
    c.seed = seed
    c.instance = expr
    return c


CHECKS: dict[str, Callable] = {
    "downset-completion": _poset_check,
    "lex-primary": _doctrine_check(validate_doctrine),
    "existential": _doctrine_check(lambda p, b, expr: existential_structure(p, "all", b, instance=expr)[1]),
    "hyperdoctrine": _doctrine_check(hyperdoctrine_check),
    "tripos": _doctrine_check(_second(classifier_search)),
    "power-objects": _doctrine_check(_second(power_object_search)),
    "RC": _doctrine_check(check_RC),
    "CA": _doctrine_check(_first(check_CA)),
    "supercompactifiable": _doctrine_check(_supercompact),
    "points-wdp": _doctrine_check(_points_wdp),
    "points-generic-proof": _doctrine_check(_points_gp),
    "generic-proof": _generic_proof,
    "category-laws": _category_laws,
    "sheafification": _sheafification,
}


def run_check(env: Environment, prop: str, expr: str, seed: int) -> list[Certificate]:
    if prop not in CHECKS:
        raise UsageError(f"unknown property {prop!r}; choose from {', '.join(sorted(CHECKS))}")
    obj = env.eval(expr)
    try:
        return [CHECKS[prop](obj, env.budget, seed, expr)]
    except BudgetExhausted as exc:
        return [Certificate(prop, expr, env.budget.to_json()).fail(str(exc), EXHAUSTED).done()]


# ---------------------------------------------------------------------------
# complete


COMPLETIONS = ("points", "compex", "reg", "T", "presh")


def run_complete(env: Environment, kind: str, expr: str, seed: int) -> list[Certificate]:
    if kind not in COMPLETIONS:
        raise UsageError(f"unknown completion {kind!r}; choose from {', '.join(COMPLETIONS)}")
    b = env.budget
    p = _need(env.eval(expr), Doctrine, "doctrine", expr)
    target = f"{kind}({expr})"
    cert = Certificate("completion_summary", target, b.to_json())
    cert.seed = seed
    try:
        if kind == "points":
            g: PointsCategory = env.eval(target)
            objs = g.objects(b)
            cert.checks.update(objects=len(objs), arrows=sum(1 for _ in g.arrows(b)))
        elif kind == "compex":
            pe, cm = existential_completion(p, b)
            cert.add(cm.certificate)
            objs = pe.base.objects(b)
            cert.checks["base_objects"] = len(objs)
            cert.witness({"fibre_sizes": [[pe.base.label(a), len(pe.elements(a))] for a in objs]})
        else:
            cat: RelCategory = env.eval(target)
            objs = cat.objects(b)
            cert.checks.update(objects=len(objs), arrows=sum(len(cat.hom(x, y)) for x in objs for y in objs))
            laws = category_laws(cat, b, sample=DEFAULT_SAMPLE, seed=seed, instance=target)
            laws.seed = seed
            cert.add(laws)
    except BudgetExhausted as exc:
        cert.fail(str(exc), EXHAUSTED)
    return [cert.done()]


# ---------------------------------------------------------------------------
# equiv


def _prefasci(p: Doctrine, b: Budget, expr: str) -> Certificate:
    """comparison_ex on a localic doctrine plus the values of compex being D(S)."""
    from .comparison import comparison_ex
    cert = Certificate("prefasci-e-fasci", expr, b.to_json())
    if not isinstance(p, PointwiseDoctrine):
        return cert.fail({"precondition": f"{expr} is not a localic doctrine over finite sets"}, ABSENT).done()
    _, ce = comparison_ex(p, b, instance=expr)
    cert.add(ce)
    pe, _ = existential_completion(p, b)
    vals = Certificate("compex_values_are_downsets", expr, b.to_json())
    try:
        frame, _ = downset_completion(MeetSemilattice.from_poset(p.values))
    except OrderError as exc:
        cert.add(vals.fail({"values_not_meet_semilattice": str(exc)}).done())
        return cert.done()
    iso = find_isomorphism(pe.values, frame.poset)
    if iso is None:
        vals.fail({"not_isomorphic": [len(pe.values), len(frame.poset)]})
    else:
        vals.witness({"iso_size": len(iso)})
    cert.add(vals.done())
    return cert.done()


def run_equiv(env: Environment, thm: str, expr: str, seed: int) -> list[Certificate]:
    from .comparison import comparison_ex, comparison_reg
    p = _need(env.eval(expr), Doctrine, "doctrine", expr)
    b = env.budget
    if thm == "comparison_reg":
        return [comparison_reg(p, b, instance=expr)[1]]
    if thm == "comparison_ex":
        return [comparison_ex(p, b, instance=expr)[1]]
    if thm == "prefasci-e-fasci":
        return [_prefasci(p, b, expr)]
    raise UsageError(f"unknown theorem {thm!r}; choose from comparison_reg, comparison_ex, prefasci-e-fasci")


# ---------------------------------------------------------------------------
# demo


DEMO_DOCTRINE = ("lex-primary", "existential", "hyperdoctrine", "tripos", "RC", "supercompactifiable")


def run_demo(env: Environment, name: str, seed: int) -> list[Certificate]:
    lib = library_file()
    if name in lib.posets:
        return run_check(env, "downset-completion", name, seed)
    if name not in LIBRARY_DOCTRINES:
        choices = sorted(lib.posets) + list(LIBRARY_DOCTRINES)
        raise UsageError(f"unknown library instance {name!r}; choose from {', '.join(choices)}")
    out = []
    for prop in DEMO_DOCTRINE:
        out.extend(run_check(env, prop, name, seed))
    out.extend(run_equiv(env, "comparison_reg", name, seed))
    return out


# ---------------------------------------------------------------------------
# output


def canonical_order(certs: list[Certificate]) -> list[Certificate]:
    return sorted(certs, key=lambda c: (c.instance, c.property))


def report_json(certs: list[Certificate], seed: int, budget: Budget, universe: int) -> dict:
    return {
        "seed": seed,
        "universe": universe,
        "budget": budget.to_json(),
        "verdict": worst(c.verdict for c in certs),
        "certificates": [c.to_json() for c in canonical_order(certs)],
    }


def render_text(certs: list[Certificate], extra: list[str] | None = None) -> str:
    lines = []
    for c in canonical_order(certs):
        lines.extend(c.lines())
        if c.seed is not None:
            lines.append(f"  seed: {c.seed}")
    lines.extend(extra or [])
    lines.append(f"verdict: {worst(c.verdict for c in certs)}")
    return "\n".join(lines)


def _sheaf_text(cert: Certificate) -> list[str]:
    out = []
    for w in cert.witnesses:
        for row in w.get("closure_table", []):
            out.append(f"closure on {json.dumps(row['object'])}:")
            for s, c in row["closures"]:
                out.append(f"  {json.dumps(s)} -> {json.dumps(c)}")
    for sub in cert.subs:
        if sub.property == "sheaf_roster":
            for w in sub.witnesses:
                out.append(f"sheaves ({len(w['sheaves'])}):")
                out.extend(f"  {json.dumps(s)}" for s in w["sheaves"])
                disc = w["discrepancies"]
                out.append("discrepancies: none" if not disc else f"discrepancies ({len(disc)}):")
                out.extend(f"  {json.dumps(d, sort_keys=True)}" for d in disc)
    return out


def exit_code(certs: list[Certificate]) -> int:
    return EXIT_CODES[worst(c.verdict for c in certs)] if certs else 0


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget-universe", "--universe", dest="universe", type=int, default=DEFAULT_UNIVERSE,
                        help="size of the FinSet universe and of the largest enumerated set (default 2)")
    common.add_argument("--budget-competitors", dest="competitors", type=int, default=500,
                        help="maximum competitor diagrams per search (default 500)")
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks (default 0)")
    common.add_argument("--instance", metavar="PATH", help="instance file providing named structures")

    parser = argparse.ArgumentParser(prog="tripos-forge", description="Finite-scale tripos workbench.")
    sub = parser.add_subparsers(dest="command", required=True)
    c = sub.add_parser("check", parents=[common], help="run one property check")
    c.add_argument("property", help=", ".join(sorted(CHECKS)))
    c.add_argument("target", metavar="expr|path")
    c = sub.add_parser("complete", parents=[common], help="build a completion and summarize it")
    c.add_argument("kind", choices=COMPLETIONS)
    c.add_argument("target", metavar="expr|path")
    c = sub.add_parser("equiv", parents=[common], help="certify a comparison functor")
    c.add_argument("theorem", choices=("comparison_reg", "comparison_ex", "prefasci-e-fasci"))
    c.add_argument("target", metavar="expr|path")
    c = sub.add_parser("sheafify", parents=[common], help="embedding, closure table and sheaf roster")
    c.add_argument("target", metavar="expr|path")
    c = sub.add_parser("demo", parents=[common], help="standard battery on a library instance")
    c.add_argument("target", metavar="library-instance")
    c = sub.add_parser("report", parents=[common], help="render a saved JSON report")
    c.add_argument("target", metavar="path")
    return parser


def _resolve(target: str, instance: str | None, universe: int, budget: Budget) -> tuple[Environment, str]:
    """Returns the environment and the expression to evaluate."""
    inst = parse(instance) if instance else None
    path = Path(target)
    if target.endswith(".json"):
        if not path.is_file():
            path = builtin_instance(target)
        inst = parse(path)
        env = Environment(inst, universe, budget)
        if inst.main is None:
            raise InstanceError(f"{target} has no 'main' expression")
        return env, inst.main
    return Environment(inst, universe, budget), target


def _report(path: str, fmt: str) -> tuple[list[Certificate], str]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        certs = [Certificate.from_json(c) for c in data["certificates"]]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InstanceError(f"cannot read report {path}: {exc}") from exc
    if fmt == "json":
        return certs, json.dumps(data, indent=2, sort_keys=True)
    return certs, render_text(certs)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.universe <= 0 or args.competitors <= 0:
            raise UsageError("budgets must be positive")
        if args.command == "report":
            certs, text = _report(args.target, args.format)
            print(text)
            return exit_code(certs)
        budget = Budget(max_set_size=args.universe, max_competitors=args.competitors)
        env, expr = _resolve(args.target, args.instance, args.universe, budget)
        extra: list[str] = []
        if args.command == "check":
            certs = run_check(env, args.property, expr, args.seed)
        elif args.command == "complete":
            certs = run_complete(env, args.kind, expr, args.seed)
        elif args.command == "equiv":
            certs = run_equiv(env, args.theorem, expr, args.seed)
        elif args.command == "sheafify":
            certs = run_check(env, "sheafification", expr, args.seed)
            extra = _sheaf_text(certs[0])
        else:
            certs = run_demo(env, expr, args.seed)
    except (UsageError, InstanceError) as exc:
        print(f"tripos-forge: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    for c in certs:
        c.sync()
    if args.format == "json":
        print(json.dumps(report_json(certs, args.seed, env.budget, args.universe), indent=2, sort_keys=True))
    else:
        print(render_text(certs, extra))
    return exit_code(certs)


if __name__ == "__main__":
    sys.exit(main())
