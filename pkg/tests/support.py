"""Fixtures and brute-force oracles shared by the tests."""

import itertools
import random
from collections import defaultdict

from wncoeff.agraph import AGraph, EmptyCore, core, is_connected, reduced_rank, subgroup_graph
from wncoeff.groups import free_product

C33 = free_product(3, 3)
C23 = free_product(2, 3)
C24 = free_product(2, 4)


def k1() -> AGraph:
    """Three primaries, u1 of type 1 and u2 of type 2, labels 0,1,2 on both."""
    edges = [(p, 0, p) for p in range(3)] + [(p, 1, p) for p in range(3)]
    return AGraph.build(range(3), [(0, 1), (1, 2)], edges, None)


def graph_of(gens, spec) -> AGraph:
    return core(subgroup_graph(gens, spec).graph)


def rand_word(rng, spec, n):
    w = []
    f = rng.randint(1, spec.m)
    for _ in range(n):
        w.append((f, rng.randrange(1, spec.factor(f).order)))
        f = rng.choice([x for x in range(1, spec.m + 1) if x != f])
    return w


def rand_sub(rng, spec, maxvp=6, ngen=2, lengths=(2, 6)):
    """Random factor-free noncyclic subgroup: (generators, connected core graph)."""
    while True:
        gens = [rand_word(rng, spec, rng.randint(*lengths)) for _ in range(ngen)]
        v = subgroup_graph(gens, spec)
        if not v.factor_free:
            continue
        try:
            c = core(v.graph)
        except EmptyCore:
            continue
        if reduced_rank(c) > 0 and len(c.primary) <= maxvp and is_connected(c):
            return gens, c


def random_subgroups(seed, spec, count, **kw):
    rng = random.Random(seed)
    return [rand_sub(rng, spec, **kw) for _ in range(count)]


# ---------------------------------------------------------------------------
# oracles written straight from the definitions

def literal_classes(fn, y1, grp):
    """Closure of the literal relation on pairs (a, u) of an alpha-function.

    (a,u) ~ (b,v) when edges u-w and v-w into one type-alpha secondary have
    labels with l(u) l(v)^-1 = a b^-1.
    """
    pts = [(a, y1.primary[i]) for a, img in zip(fn.T, fn.images)
           for i in range(len(y1.primary)) if img >> i & 1]
    edge = {}
    for p, s, l in y1.edges:
        if y1.sec_type[s] == fn.alpha:
            edge[p] = (s, l)
    parent = {x: x for x in pts}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for (a, u), (b, v) in itertools.combinations(pts, 2):
        if u in edge and v in edge and edge[u][0] == edge[v][0]:
            lu, lv = edge[u][1], edge[v][1]
            if grp.mul(lu, grp.inv(lv)) == grp.mul(a, grp.inv(b)):
                parent[find((a, u))] = find((b, v))
    out = defaultdict(set)
    for x in pts:
        out[find(x)].add(x)
    return sorted(sorted(c) for c in out.values())


def naive_fiber_brr(y1, y2, spec):
    """-chi of the cored fiber product, classes by pairwise comparison."""
    pairs = list(itertools.product(y1.primary, y2.primary))
    edges = []
    sec_id = itertools.count()
    for alpha in sorted(y1.types() | y2.types()):
        grp = spec.factor(alpha)
        e1 = {p: (s, l) for p, s, l in y1.edges if y1.sec_type[s] == alpha}
        e2 = {p: (s, l) for p, s, l in y2.edges if y2.sec_type[s] == alpha}
        both = [pr for pr in pairs if pr[0] in e1 and pr[1] in e2]
        parent = {pr: pr for pr in both}

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        for P, Q in itertools.combinations(both, 2):
            (w1, x1), (w2, x2) = e1[P[0]], e2[P[1]]
            (z1, y1_), (z2, y2_) = e1[Q[0]], e2[Q[1]]
            if w1 == z1 and w2 == z2 and grp.mul(x1, grp.inv(y1_)) == grp.mul(x2, grp.inv(y2_)):
                parent[find(P)] = find(Q)
        roots = {}
        for pr in both:
            r = find(pr)
            if r not in roots:
                roots[r] = next(sec_id)
            edges.append((pr, roots[r]))
        for pr in pairs:
            if (pr[0] in e1) != (pr[1] in e2):
                edges.append((pr, next(sec_id)))
    # core by repeated pruning; every remaining component has E >= V
    while True:
        deg = defaultdict(int)
        for p, s in edges:
            deg["p", p] += 1
            deg["s", s] += 1
        keep = [(p, s) for p, s in edges if deg["p", p] > 1 and deg["s", s] > 1]
        if len(keep) == len(edges):
            break
        edges = keep
    verts = {("p", p) for p, _ in edges} | {("s", s) for _, s in edges}
    return len(edges) - len(verts)
