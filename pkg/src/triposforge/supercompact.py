"""Weak dependent products and generic proofs in G_P, and the ∃-supercompactifiability routes."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Any

from .certificate import ABSENT, EXHAUSTED, FAIL, PASS, Certificate, jsonable
from .completions import PointsCategory, Pt, PtArrow, existential_completion, points, points_weak_subobjects
from .doctrine import Doctrine, MissingAdjoint, PointwiseDoctrine, classifier_search, hyperdoctrine_check
from .fincat import (DEFAULT_BUDGET, Budget, BudgetExhausted, EnumCategory, FinSet, WDPDiagram,
                     check_weakly_terminal, generic_proof_factorization, generic_proof_search, mediates,
                     wdp_competitors, weak_dependent_product)
from .relational import Rel, RelObj, TCategory


class PreconditionError(ValueError):
    """A construction's prerequisites (∀, →, classifier, base witness) are missing."""


# ---------------------------------------------------------------------------
# weak dependent products in G_P


@lru_cache(maxsize=None)
def _base_wdp(c: EnumCategory, f, g, b: Budget):
    return weak_dependent_product(c, f, g, b)


def sigma_predicate(p: Doctrine, base_d: WDPDiagram, f: PtArrow, g: PtArrow):
    """σ = ∀_{q2}(P_{q1}β → P_e α) ∧ P_h γ on the base Z."""
    alpha, beta, gamma = f.dom.pred, f.cod.pred, g.cod.pred
    e_obj = base_d.e_obj
    inner = p.implies(e_obj, p.reindex(base_d.q1, beta), p.reindex(base_d.e, alpha))
    return p.meet(base_d.z, p.forall(base_d.q2, inner), p.reindex(base_d.h, gamma))


def lift_diagram(g_cat: PointsCategory, base_d: WDPDiagram, f: PtArrow, g: PtArrow, sigma) -> WDPDiagram | None:
    """The G_P diagram over the base diagram with Z decorated by σ, or None if e is not admissible."""
    z = Pt(base_d.z, sigma)
    h = PtArrow(z, g.cod, base_d.h)
    if not g_cat.admits(z, g.cod, base_d.h):
        return None
    e_pt, q1, q2 = g_cat.pullback(g, h)
    if not g_cat.admits(e_pt, f.dom, base_d.e):
        return None
    return WDPDiagram(z, h, e_pt, q1, q2, PtArrow(e_pt, f.dom, base_d.e))


@dataclass
class PointsWDP:
    diagram: WDPDiagram
    sigma: Any
    brute: Any

    def to_json(self) -> dict:
        return {"diagram": self.diagram.to_json(), "sigma": jsonable(self.sigma), "brute_force": jsonable(self.brute)}


def points_wdp(p: Doctrine, f: PtArrow, g: PtArrow, b: Budget = DEFAULT_BUDGET, *, brute_force: bool = True,
               g_cat: PointsCategory | None = None):
    """Weak dependent product of f along g in G_P via σ over a base witness.

    Certifies weak terminality against all enumerated competitors, the
    competitor inequality σ' ≤ ∀_{q2'}(P_{q1'}β → P_{e'}α) ∧ P_{h'}γ, σ' ≤ P_w(σ)
    for each mediating w, and (optionally) mutual domination with the first
    weakly terminal predicate found by brute force over P(Z).
    """
    g_cat = g_cat or points(p)
    c = p.base
    cert = Certificate("points_wdp", p.name, b.to_json())
    base_d, bc = _base_wdp(c, f.arrow, g.arrow, b)
    if base_d is None:
        cert.add(bc)
        return None, cert.done()
    try:
        sigma = sigma_predicate(p, base_d, f, g)
    except MissingAdjoint as exc:
        raise PreconditionError(f"doctrine lacks ∀ or →: {exc}") from exc
    d = lift_diagram(g_cat, base_d, f, g, sigma)
    if d is None:
        return None, cert.fail({"sigma_diagram_not_admissible": c.label(base_d.h)}).done()
    try:
        competitors = wdp_competitors(g_cat, f, g, b)
    except BudgetExhausted as exc:
        return None, cert.fail(str(exc), EXHAUSTED).done()
    cert.checks["competitors"] = len(competitors)
    if not check_weakly_terminal(g_cat, d, competitors, cert):
        return None, cert.done()
    alpha, beta, gamma = f.dom.pred, f.cod.pred, g.cod.pred
    for o in competitors:
        cert.count("lemma_precondition")
        bound = p.meet(o.z.obj, p.forall(o.q2.arrow, p.implies(o.e_obj.obj, p.reindex(o.q1.arrow, beta),
                                                               p.reindex(o.e.arrow, alpha))),
                       p.reindex(o.h.arrow, gamma))
        if not p.leq(o.z.obj, o.z.pred, bound):
            return None, cert.fail({"lemma_precondition": g_cat.label(o.z)}).done()
        w, _ = mediates(g_cat, d, o)
        cert.count("mediator_inequality")
        if not p.leq(o.z.obj, o.z.pred, p.reindex(w.arrow, sigma)):
            return None, cert.fail({"mediator_inequality": g_cat.label(o.z)}).done()
    brute = None
    if brute_force:
        z = base_d.z
        for cand in p.elements_below(z, p.reindex(base_d.h, gamma)):
            cert.count("brute_force_candidates")
            dc = lift_diagram(g_cat, base_d, f, g, cand)
            if dc is None or any(mediates(g_cat, dc, o) is None for o in competitors):
                continue
            brute = cand
            if mediates(g_cat, d, dc) is None or mediates(g_cat, dc, d) is None:
                return None, cert.fail({"not_mutually_dominating": [p.label(z, sigma), p.label(z, cand)]}).done()
            break
        if brute is None:
            return None, cert.fail("brute force found no weakly terminal predicate").done()
        cert.count("mutual_domination")
    w = PointsWDP(d, sigma, brute)
    cert.witness(w)
    return w, cert.done()


def points_cospans(g_cat: PointsCategory, b: Budget):
    objs = g_cat.objects(b)
    for x in objs:
        for j in objs:
            for f in g_cat.hom(x, j):
                for i in objs:
                    for g in g_cat.hom(j, i):
                        yield f, g


def points_wdp_all(p: Doctrine, b: Budget = DEFAULT_BUDGET, *, brute_force: bool = True) -> Certificate:
    """points_wdp on every enumerated cospan of G_P."""
    g_cat = points(p)
    cert = Certificate("points_wdp_all", p.name, b.to_json())
    try:
        cospans = list(points_cospans(g_cat, b))
    except BudgetExhausted as exc:
        return cert.fail(str(exc), EXHAUSTED).done()
    for f, g in cospans:
        cert.count("cospans")
        w, sub = points_wdp(p, f, g, b, brute_force=brute_force, g_cat=g_cat)
        if not sub.ok:
            sub.instance = f"{g_cat.label(f)} ; {g_cat.label(g)}"
            cert.add(sub)
            break
        cert.count("competitors", sub.checks.get("competitors", 0))
    return cert.done()


# ---------------------------------------------------------------------------
# generic proof in G_P


@dataclass
class PointsGenericProof:
    theta: PtArrow
    omega: Any
    pomega: Any

    def to_json(self) -> dict:
        return {"theta_dom": jsonable(self.theta.dom), "PΩ_size": len(self.pomega)}


def _naming(member, alpha) -> tuple:
    """χ with P_χ(∈) = α: each point goes to a point of Ω carrying the value α(y)."""
    where = {}
    for k, v in enumerate(member):
        where.setdefault(v, k)
    return tuple(where[v] for v in alpha)


def points_generic_proof(p: Doctrine, b: Budget = DEFAULT_BUDGET, *, g_cat: PointsCategory | None = None):
    """θ = π_{PΩ} ∘ ∈_Ω : (Θ_Ω, P_{π_Ω ∈_Ω}(∈)) → (PΩ, ⊤), checked on every enumerated arrow.

    For f: (Y, α) → (X, β), with υ(x) = {α(y) : f(y) = x} and E the pullback of
    υ and θ, finds e1: E → Y and e2: Y → E over X with
    P_{a1}(β) ∧ P_{π_Ω a2}(∈) = P_{e1}(α) and α = P_{e1 e2}(α).
    """
    cert = Certificate("points_generic_proof", p.name, b.to_json())
    c = p.base
    if not isinstance(p, PointwiseDoctrine) or not isinstance(c, FinSet):
        raise PreconditionError("constructive generic proof needs a pointwise doctrine over FinSet")
    w, wc = classifier_search(p, b)
    if w is None:
        raise PreconditionError("no weak predicate classifier")
    g_cat = g_cat or points(p)
    om, member = w.omega, w.member
    pom, inc = c.powerset(om)
    omp, pi_om, pi_pom = c.product(om, pom)
    theta_base = c.compose(pi_pom, inc)
    theta_pred = p.reindex(c.compose(pi_om, inc), member)
    theta_dom = Pt(inc.dom, theta_pred)
    theta = PtArrow(theta_dom, g_cat.top_point(pom), theta_base)
    try:
        arrows = list(g_cat.arrows(b))
    except BudgetExhausted as exc:
        return None, cert.fail(str(exc), EXHAUSTED).done()
    for f in arrows:
        cert.count("arrows")
        y_pt, x_pt = f.dom, f.cod
        y_obj, x_obj = y_pt.obj, x_pt.obj
        chi = _naming(member, y_pt.pred)
        if p.reindex(type(f.arrow)(y_obj, om, chi), member) != y_pt.pred:
            return None, cert.fail({"naming_failed": g_cat.label(y_pt)}).done()
        ups = []
        for xi in range(len(x_obj)):
            s = tuple(om[k] for k in sorted({chi[yi] for yi in range(len(y_obj)) if f.arrow.idx[yi] == xi}))
            ups.append(pom.index(s))
        upsilon = type(f.arrow)(x_obj, pom, ups)
        ups_pt = PtArrow(x_pt, theta.cod, upsilon)
        e_pt, a1, a2 = g_cat.pullback(ups_pt, theta)
        target_pred = p.meet(e_pt.obj, p.reindex(a1.arrow, x_pt.pred),
                             p.reindex(c.compose(c.compose(pi_om, inc), a2.arrow), member))
        if target_pred != e_pt.pred:
            return None, cert.fail({"pullback_predicate": g_cat.label(f)}).done()
        found = None
        for e1 in c.hom(e_pt.obj, y_obj):
            if c.compose(f.arrow, e1) != a1.arrow or p.reindex(e1, y_pt.pred) != e_pt.pred:
                continue
            for e2 in c.hom(y_obj, e_pt.obj):
                if c.compose(a1.arrow, e2) != f.arrow or not g_cat.admits(y_pt, e_pt, e2):
                    continue
                if p.reindex(c.compose(e1, e2), y_pt.pred) == y_pt.pred:
                    found = (e1, e2)
                    break
            if found:
                break
        if found is None:
            return None, cert.fail({"no_factorization": g_cat.label(f)}).done()
        cert.count("fibre_equalities", 2)
        if generic_proof_factorization(g_cat, theta, f) is None:
            return None, cert.fail({"points_factorization": g_cat.label(f)}).done()
        cert.count("points_factorizations")
    gp = PointsGenericProof(theta, om, pom)
    cert.witness(gp)
    return gp, cert.done()


# ---------------------------------------------------------------------------
# ∃-supercompactifiability


def _tripos_checks(p: Doctrine, b: Budget, name: str) -> Certificate:
    cert = Certificate(name, p.name, b.to_json())
    cert.add(hyperdoctrine_check(p, b))
    w, wc = classifier_search(p, b)
    cert.add(wc)
    return cert.done()


def _route_points(p: Doctrine, b: Budget) -> Certificate:
    cert = Certificate("route_points_wdp_generic_proof", p.name, b.to_json())
    g_cat = points(p)
    constructive = isinstance(p, PointwiseDoctrine) and isinstance(p.base, FinSet)
    if constructive:
        try:
            cert.add(points_wdp_all(p, b, brute_force=False))
            _, gc = points_generic_proof(p, b, g_cat=g_cat)
            cert.add(gc)
            cert.witness({"method": "constructive"})
            return cert.done()
        except PreconditionError as exc:
            cert.witness({"constructive_unavailable": str(exc)})
            cert.subs.clear()
            cert.verdict = PASS
    cert.witness({"method": "search"})
    sub = cert.add(Certificate("points_wdp_search", p.name, b.to_json()))
    try:
        cospans = list(points_cospans(g_cat, b))
    except BudgetExhausted as exc:
        sub.fail(str(exc), EXHAUSTED)
        cospans = []
    for f, g in cospans:
        sub.count("cospans")
        d, dc = weak_dependent_product(g_cat, f, g, b)
        if d is None:
            sub.add(dc)
            break
    sub.done()
    _, gc = generic_proof_search(g_cat, b)
    cert.add(gc)
    return cert.done()


def _route_presh_probe(p: Doctrine, b: Budget) -> Certificate:
    """Subobject classifier search in presh(P) at a reduced set size."""
    sb = Budget(max_objects=b.max_objects, max_set_size=1, max_competitors=b.max_competitors,
                max_depth=b.max_depth, max_fibre=b.max_fibre)
    cert = Certificate("route_presh_topos_probe", p.name, sb.to_json())
    psi = points_weak_subobjects(points(p), sb)
    t = TCategory(psi, sb, name=f"presh({p.name})")
    try:
        objs = t.objects(sb)
    except BudgetExhausted as exc:
        return cert.fail(str(exc), EXHAUSTED).done()
    sub = cert.add(Certificate("subobject_classifier_search", t.name, sb.to_json()))
    found = subobject_classifier_search(t, objs, sub, candidates=list(omega_candidates(t)))
    sub.done()
    if found is None and sub.ok:
        sub.fail("no subobject classifier within budget", ABSENT)
        cert.verdict = ABSENT
    return cert.done()


def _monos(t: TCategory, objs, e):
    """Subobjects of e as arrows m: d → e with trivial kernel, up to iso of domains."""
    out = []
    for d in objs:
        for m in t.hom(d, e):
            if is_mono(t, m):
                out.append(m)
    return out


def is_mono(t: TCategory, m) -> bool:
    """m is monic iff its kernel pair is the identity: m ∘ m° = dom identity on the support."""
    return t.compose(t.converse(m), m) == t.identity(m.dom)


def _same_subobject(t: TCategory, m, n) -> bool:
    return any(t.compose(n, u) == m for u in t.hom(m.dom, n.dom)) and \
        any(t.compose(m, u) == n for u in t.hom(n.dom, m.dom))


def omega_candidates(t: TCategory):
    """(Ω, ↔) with true(*, u) = ∈(u), from each weak predicate classifier candidate of the doctrine."""
    p, c = t.doctrine, t.base
    one = c.terminal()
    for om, member in p.classifier_candidates():
        oo, p1, p2 = t.s.two(om, om)
        rho = p.iff(oo, p.reindex(p1, member), p.reindex(p2, member))
        omega = RelObj(om, rho)
        if t.object_violation(om, rho) is not None:
            continue
        _, _, q2 = t.s.two(one, om)
        yield omega, p.reindex(q2, member)


def subobject_classifier_search(t: TCategory, objs, cert: Certificate, candidates=()):
    """(Ω, true: 1 → Ω) with hom(E, Ω) ≅ Sub(E) via pullback along true, for every enumerated E.

    ``candidates`` are (Ω, φ) pairs tried before the enumerated objects, with
    φ the predicate of a candidate true arrow.
    """
    terminal = [o for o in objs if all(len(t.hom(x, o)) == 1 for x in objs)]
    if not terminal:
        cert.fail("no terminal object among enumerated objects", ABSENT)
        return None
    one = terminal[0]
    subs = {e: _classes(t, _monos(t, objs, e)) for e in objs}
    pool = []
    for om, phi in candidates:
        clause = t.violation(one, om, phi, check_bound=True)
        if clause is None:
            pool.append((om, [Rel(one, om, phi)]))
    pool.extend((om, t.hom(one, om)) for om in objs)
    for om, trues in pool:
        for tr in trues:
            if not is_mono(t, tr):
                continue
            cert.count("candidates")
            if _classifies(t, objs, one, om, tr, subs):
                cert.witness({"omega": t.label(om), "true": t.label(tr)})
                return om, tr
    return None


def _classes(t: TCategory, monos):
    reps = []
    for m in monos:
        if not any(_same_subobject(t, m, r) for r in reps):
            reps.append(m)
    return reps


def _pullback_of_true(t: TCategory, objs, one, tr, chi, monos):
    """The mono among ``monos`` that is a pullback of ``tr`` along ``chi``."""
    hits = []
    for m in monos:
        k = t.compose(chi, m)
        bang = t.hom(m.dom, one)
        if len(bang) != 1 or t.compose(tr, bang[0]) != k:
            continue
        universal = True
        for d in objs:
            for u in t.hom(d, chi.dom):
                if t.compose(chi, u) in {t.compose(tr, v) for v in t.hom(d, one)}:
                    if sum(1 for w in t.hom(d, m.dom) if t.compose(m, w) == u) != 1:
                        universal = False
                        break
            if not universal:
                break
        if universal:
            hits.append(m)
    return hits


def _classifies(t: TCategory, objs, one, om, tr, subs) -> bool:
    for e in objs:
        seen = []
        for chi in t.hom(e, om):
            hits = _pullback_of_true(t, objs, one, tr, chi, subs[e])
            if len(hits) != 1:
                return False
            if any(_same_subobject(t, hits[0], s) for s in seen):
                return False
            seen.append(hits[0])
        if len(seen) != len(subs[e]):
            return False
    return True


def _route_base(p: Doctrine, b: Budget) -> Certificate:
    cert = Certificate("route_base_wdp_generic_proof", p.name, b.to_json())
    c = p.base
    sub = cert.add(Certificate("base_wdp", c.name, b.to_json()))
    try:
        objs = c.objects(b)
        cospans = [(f, g) for x in objs for j in objs for f in c.hom(x, j) for i in objs for g in c.hom(j, i)]
    except BudgetExhausted as exc:
        sub.fail(str(exc), EXHAUSTED)
        cospans = []
    for f, g in cospans:
        sub.count("cospans")
        d, dc = _base_wdp(c, f, g, b)
        if d is None:
            sub.add(dc)
            break
    sub.done()
    _, gc = generic_proof_search(c, b)
    cert.add(gc)
    return cert.done()


def supercompactifiable_check(p: Doctrine, b: Budget = DEFAULT_BUDGET, instance: str = "") -> Certificate:
    """Evaluate the equivalent conditions for ∃-supercompactifiability and cross-check them.

    Verdict: pass when every route passes, absent-at-budget when every route
    fails to produce its witness, fail when the routes disagree.
    """
    cert = Certificate("supercompactifiable", instance or p.name, b.to_json(), verdict_rule="explicit")
    routes = [_route_points(p, b)]
    g_cat = points(p)
    routes.append(_tripos_checks(points_weak_subobjects(g_cat, b), b, "route_points_weak_subobjects_tripos"))
    pe, _ = existential_completion(p, b)
    routes.append(_tripos_checks(pe, b, "route_compex_tripos"))
    routes.append(_route_presh_probe(p, b))
    base_tripos = _tripos_checks(p, b, "input_tripos")
    if base_tripos.ok:
        routes.append(_route_base(p, b))
    for r in routes:
        cert.subs.append(r)
    cert.subs.append(base_tripos)
    verdicts = [r.verdict for r in routes]
    cert.checks["routes"] = len(routes)
    cert.checks["routes_passing"] = sum(v == PASS for v in verdicts)
    if any(v == EXHAUSTED for v in verdicts):
        cert.verdict = EXHAUSTED
        cert.counterexample = {"exhausted": [r.property for r in routes if r.verdict == EXHAUSTED]}
    elif all(v == PASS for v in verdicts):
        cert.verdict = PASS
    elif all(v != PASS for v in verdicts):
        cert.verdict = ABSENT
        cert.witness({"consistent": "no route passes"})
    else:
        cert.verdict = FAIL
        cert.counterexample = {"inconsistent_routes": {r.property: r.verdict for r in routes}}
    return cert.done()
