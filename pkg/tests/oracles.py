"""Independent brute-force oracles and hypothesis strategies shared by the tests.

Nothing here imports the structure-computing parts of triposforge; the
oracles work on plain Python sets and relations.
"""
import itertools

from hypothesis import strategies as st

from triposforge.order import FinPoset


def closure(n, pairs):
    le = [[i == j for j in range(n)] for i in range(n)]
    for i, j in pairs:
        le[i][j] = True
    for k, i, j in itertools.product(range(n), repeat=3):
        if le[i][k] and le[k][j]:
            le[i][j] = True
    return le


@st.composite
def posets(draw, max_size=5):
    """Random posets: relations generated by pairs i < j, then transitively closed."""
    n = draw(st.integers(1, max_size))
    cand = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(cand), unique=True)) if cand else []
    return FinPoset([f"p{i}" for i in range(n)], closure(n, chosen))


@st.composite
def posets_with_top(draw, max_size=5):
    p = draw(posets(max_size))
    n = len(p)
    le = [list(row) + [True] for row in p.table]
    le.append([False] * n + [True])
    return FinPoset(list(p.elems) + ["top"], le)


def leq(p, x, y):
    return p.table[p.elems.index(x)][p.elems.index(y)]


def lower(p, xs):
    return [z for z in p.elems if all(leq(p, z, x) for x in xs)]


def upper(p, xs):
    return [z for z in p.elems if all(leq(p, x, z) for x in xs)]


def greatest(p, xs):
    g = [x for x in xs if all(leq(p, y, x) for y in xs)]
    return g[0] if g else None


def least(p, xs):
    g = [x for x in xs if all(leq(p, x, y) for y in xs)]
    return g[0] if g else None


def meet(p, x, y):
    return greatest(p, lower(p, [x, y]))


def join(p, x, y):
    return least(p, upper(p, [x, y]))


def implication(p, b, c):
    """max{a : a ∧ b ≤ c}, or None."""
    cands = [a for a in p.elems if meet(p, a, b) is not None and leq(p, meet(p, a, b), c)]
    return greatest(p, cands)


def downsets(p):
    out = []
    for r in range(len(p) + 1):
        for combo in itertools.combinations(p.elems, r):
            s = set(combo)
            if all(y in s for x in s for y in p.elems if leq(p, y, x)):
                out.append(frozenset(s))
    return out


def supercompact(p):
    """x with: x ≤ ⋁S implies x ≤ s for some s ∈ S, over all subsets S (lattice p)."""
    def join_all(xs):
        return least(p, upper(p, xs))
    out = []
    subsets = [c for r in range(len(p) + 1) for c in itertools.combinations(p.elems, r)]
    for x in p.elems:
        if all(any(leq(p, x, s) for s in S) for S in subsets if leq(p, x, join_all(S))):
            out.append(x)
    return out


def functions(dom, cod):
    """All functions dom → cod as tuples of values."""
    return list(itertools.product(cod, repeat=len(dom)))


