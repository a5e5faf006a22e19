"""Labeled bipartite graphs over a free product, with folding and coring.

An :class:`AGraph` has primary vertices and typed secondary vertices.  Each
geometric edge joins a primary ``p`` to a secondary ``s`` of type ``alpha``
and carries a label in the factor ``G_alpha``; that label is the value of
the edge oriented from ``p`` to ``s``.  Walking ``p -> s -> p'`` along edges
labelled ``x`` and ``y`` reads the letter ``x * y^-1``.

Primary and secondary ids live in separate namespaces; ids are ints after
any construction in this package but anything hashable and sortable works.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Sequence

from .groups import FreeProductSpec, Word, normalize_word


class EmptyGeneratorSet(ValueError):
    pass


class EmptyCore(ValueError):
    pass


def _sort_key(x):
    return (type(x).__name__, x)


@dataclass(frozen=True, eq=False)
class AGraph:
    """Immutable bipartite labeled graph.

    ``secondary`` holds ``(id, type)`` pairs and ``edges`` holds
    ``(primary, secondary, label)`` triples, one per geometric edge.
    """

    primary: tuple
    secondary: tuple
    edges: tuple
    base: Hashable | None = None

    @staticmethod
    def build(primary: Iterable, secondary: Iterable, edges: Iterable,
              base: Hashable | None = None) -> "AGraph":
        """Constructor that sorts everything into a deterministic order."""
        sec = tuple(sorted(((s, int(t)) for s, t in secondary), key=lambda st: _sort_key(st[0])))
        prim = tuple(sorted(set(primary), key=_sort_key))
        es = tuple(sorted(((p, s, l) for p, s, l in edges),
                          key=lambda e: (_sort_key(e[0]), _sort_key(e[1]), repr(e[2]))))
        return AGraph(prim, sec, es, base)

    # adjacency -----------------------------------------------------------
    @cached_property
    def sec_type(self) -> dict:
        return dict(self.secondary)

    @cached_property
    def p_adj(self) -> dict:
        """primary -> list of (secondary, label)."""
        adj = {p: [] for p in self.primary}
        for p, s, l in self.edges:
            adj[p].append((s, l))
        return adj

    @cached_property
    def s_adj(self) -> dict:
        """secondary -> list of (primary, label)."""
        adj = {s: [] for s, _ in self.secondary}
        for p, s, l in self.edges:
            adj[s].append((p, l))
        return adj

    @cached_property
    def p_by_type(self) -> dict:
        """primary -> {type: (secondary, label)}; meaningful under (P1)."""
        out = {p: {} for p in self.primary}
        for p, s, l in self.edges:
            out[p][self.sec_type[s]] = (s, l)
        return out

    @cached_property
    def s_by_label(self) -> dict:
        """secondary -> {label: primary}; meaningful under (P2)."""
        out = {s: {} for s, _ in self.secondary}
        for p, s, l in self.edges:
            out[s][l] = p
        return out

    @property
    def n_edges(self) -> int:
        """Geometric edge count (half the oriented count)."""
        return len(self.edges)

    @property
    def n_vertices(self) -> int:
        return len(self.primary) + len(self.secondary)

    def primary_degree(self, p) -> int:
        return len(self.p_adj[p])

    def secondary_degree(self, s) -> int:
        return len(self.s_adj[s])

    def max_degree(self) -> int:
        degs = [len(v) for v in self.p_adj.values()] + [len(v) for v in self.s_adj.values()]
        return max(degs, default=0)

    def types(self) -> set:
        return set(self.sec_type.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, AGraph):
            return NotImplemented
        return (set(self.primary) == set(other.primary)
                and set(self.secondary) == set(other.secondary)
                and sorted(map(repr, self.edges)) == sorted(map(repr, other.edges))
                and self.base == other.base)

    __hash__ = None

    def __repr__(self) -> str:
        return (f"AGraph(|VP|={len(self.primary)}, |VS|={len(self.secondary)}, "
                f"|E|={len(self.edges)}, base={self.base!r})")

    def with_base(self, base) -> "AGraph":
        return AGraph(self.primary, self.secondary, self.edges, base)

    def euler(self) -> int:
        return self.n_vertices - self.n_edges


# ---------------------------------------------------------------------------
# irreducibility

def irreducibility_violations(g: AGraph) -> list[str]:
    """Empty list iff (P1)-(P3) hold together with the degree conditions."""
    bad = []
    for p, adj in g.p_adj.items():
        seen = {}
        for s, _ in adj:
            t = g.sec_type[s]
            if t in seen and seen[t] != s:
                bad.append(f"P1 at primary {p!r}: type {t}")
            seen[t] = s
    for s, adj in g.s_adj.items():
        labels = [l for _, l in adj]
        if len(set(labels)) != len(labels):
            bad.append(f"P2 at secondary {s!r}")
        prims = [p for p, _ in adj]
        if len(set(prims)) != len(prims):
            bad.append(f"P3 multiple edge at secondary {s!r}")
    ones = []
    for p, adj in g.p_adj.items():
        if not adj and g.n_vertices > 1:
            bad.append(f"degree 0 primary {p!r}")
        if len(adj) == 1:
            ones.append(p)
    for s, adj in g.s_adj.items():
        if len(adj) == 0:
            bad.append(f"degree 0 secondary {s!r}")
        if len(adj) == 1:
            bad.append(f"degree 1 secondary {s!r}")
    if len(ones) > 1:
        bad.append(f"several degree-1 primaries {ones!r}")
    return bad


def is_irreducible(g: AGraph) -> bool:
    return not irreducibility_violations(g)


# ---------------------------------------------------------------------------
# construction and folding

def wedge_of_generators(gens: Sequence[Sequence], spec: FreeProductSpec) -> AGraph:
    """Wedge of subdivided loops at base 0, one loop per generator.

    Letter ``a`` of a generator becomes two edges into a fresh secondary
    vertex, labelled ``a`` (from the earlier primary) and the identity
    (from the later one), so the loop reads the generator.
    """
    words = [normalize_word(w, spec) for w in gens]
    words = [w for w in words if w]
    if not words:
        raise EmptyGeneratorSet("no nontrivial generator")
    prim = [0]
    sec = []
    edges = []
    np_, ns = 1, 0
    for w in words:
        prev = 0
        for j, (alpha, a) in enumerate(w):
            s = ns
            ns += 1
            sec.append((s, alpha))
            if j == len(w) - 1:
                nxt = 0
            else:
                nxt = np_
                np_ += 1
                prim.append(nxt)
            edges.append((prev, s, a))
            edges.append((nxt, s, spec.factor(alpha).identity))
            prev = nxt
    return AGraph.build(prim, sec, edges, base=0)


@dataclass(frozen=True)
class FactorFree:
    graph: AGraph

    factor_free = True


@dataclass(frozen=True)
class NotFactorFree:
    """Folding forced two edges between one primary and one secondary with
    different labels ``l1``, ``l2``; a conjugate of ``l1 * l2^-1`` in factor
    ``alpha`` then lies in the subgroup."""

    secondary: Hashable
    alpha: int
    l1: Hashable
    l2: Hashable

    factor_free = False


FoldVerdict = FactorFree | NotFactorFree


def fold_to_irreducible(g: AGraph, spec: FreeProductSpec) -> FoldVerdict:
    """Fold until (P1)-(P3) hold, or report the subgroup is not factor-free.

    The fixed order per round is: merge equal labels at a secondary, fold two
    same-type edges at a primary, prune degree-<=1 vertices other than base.
    Ids of surviving vertices are kept.
    """
    sec_type = dict(g.sec_type)
    edges = {i: [p, s, l] for i, (p, s, l) in enumerate(g.edges)}
    prim = set(g.primary)
    base = g.base

    while True:
        if _p2_step(edges, prim, base, spec, sec_type):
            continue
        res = _p1_step(edges, sec_type, spec)
        if isinstance(res, NotFactorFree):
            return res
        if res:
            continue
        if _prune_step(edges, prim, sec_type, base):
            continue
        break
    out = AGraph.build(prim, sec_type.items(), [tuple(e) for e in edges.values()], base)
    return FactorFree(out)


def _p2_step(edges, prim, base, spec, sec_type) -> bool:
    seen = {}
    for i in sorted(edges):
        p, s, l = edges[i]
        key = (s, l)
        if key not in seen:
            seen[key] = i
            continue
        j = seen[key]
        q = edges[j][0]
        if q == p:
            del edges[i]
            return True
        # identify the two edges, hence their primary endpoints
        keep, drop = (q, p) if (q == base or (p != base and _sort_key(q) <= _sort_key(p))) else (p, q)
        for e in edges.values():
            if e[0] == drop:
                e[0] = keep
        prim.discard(drop)
        del edges[i]
        return True
    return False


def _p1_step(edges, sec_type, spec):
    seen = {}
    for i in sorted(edges):
        p, s, l = edges[i]
        alpha = sec_type[s]
        key = (p, alpha)
        if key not in seen:
            seen[key] = i
            continue
        j = seen[key]
        _, s0, l0 = edges[j]
        grp = spec.factor(alpha)
        if s0 == s:
            if l0 == l:
                del edges[i]
                return True
            return NotFactorFree(s, alpha, l0, l)
        # relabel at s so that edge i gets label l0, then merge s into s0
        t = grp.mul(grp.inv(l), l0)
        for e in edges.values():
            if e[1] == s:
                e[1] = s0
                e[2] = grp.mul(e[2], t)
        del sec_type[s]
        return True
    return False


def _prune_step(edges, prim, sec_type, base) -> bool:
    deg = defaultdict(int)
    for p, s, _ in edges.values():
        deg[("p", p)] += 1
        deg[("s", s)] += 1
    dead_p = {p for p in prim if p != base and deg[("p", p)] <= 1}
    dead_s = {s for s in sec_type if deg[("s", s)] <= 1}
    if not dead_p and not dead_s:
        return False
    for i in [i for i, (p, s, _) in edges.items() if p in dead_p or s in dead_s]:
        del edges[i]
    prim -= dead_p
    for s in dead_s:
        del sec_type[s]
    return True


def subgroup_graph(gens: Sequence[Sequence], spec: FreeProductSpec) -> FoldVerdict:
    """Wedge then fold; the usual entry point from generators."""
    return fold_to_irreducible(wedge_of_generators(gens, spec), spec)


# ---------------------------------------------------------------------------
# core, rank, components

def core(g: AGraph) -> AGraph:
    """Delete degree-<=1 vertices until none remain; the base is dropped."""
    prim = set(g.primary)
    sec = dict(g.sec_type)
    edges = list(g.edges)
    while True:
        deg = defaultdict(int)
        for p, s, _ in edges:
            deg[("p", p)] += 1
            deg[("s", s)] += 1
        dead_p = {p for p in prim if deg[("p", p)] <= 1}
        dead_s = {s for s in sec if deg[("s", s)] <= 1}
        if not dead_p and not dead_s:
            break
        edges = [e for e in edges if e[0] not in dead_p and e[1] not in dead_s]
        prim -= dead_p
        for s in dead_s:
            del sec[s]
    if not prim:
        raise EmptyCore("graph has empty core")
    return AGraph.build(prim, sec.items(), edges, None)


def components(g: AGraph) -> list[AGraph]:
    """Connected components ordered by their least primary id."""
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in g.primary:
        parent[("p", p)] = ("p", p)
    for s, _ in g.secondary:
        parent[("s", s)] = ("s", s)
    for p, s, _ in g.edges:
        a, b = find(("p", p)), find(("s", s))
        if a != b:
            parent[a] = b
    groups = defaultdict(lambda: ([], [], []))
    for p in g.primary:
        groups[find(("p", p))][0].append(p)
    for s, t in g.secondary:
        groups[find(("s", s))][1].append((s, t))
    for e in g.edges:
        groups[find(("p", e[0]))][2].append(e)
    out = []
    for ps, ss, es in groups.values():
        base = g.base if g.base in ps else None
        out.append(AGraph.build(ps, ss, es, base))
    out.sort(key=lambda c: _sort_key(c.primary[0]) if c.primary else (("~",),))
    return out


def is_connected(g: AGraph) -> bool:
    return len(components(g)) <= 1


def reduced_rank(g: AGraph) -> int:
    """Sum over components of max(0, |E| - |V|) with geometric edges."""
    return sum(max(0, c.n_edges - c.n_vertices) for c in components(g))


def brr_generalized(g: AGraph) -> int:
    """-chi of a core graph without clamping (equals the clamped value on cores)."""
    return g.n_edges - g.n_vertices


# ---------------------------------------------------------------------------
# membership

def contains(g: AGraph, w: Sequence, spec: FreeProductSpec) -> bool:
    """Whether the reduced word ``w`` is in the subgroup of ``(g, base)``."""
    if g.base is None:
        raise ValueError("membership needs a base vertex")
    w = normalize_word(w, spec)
    v = g.base
    for alpha, a in w:
        hit = g.p_by_type[v].get(alpha)
        if hit is None:
            return False
        s, x = hit
        grp = spec.factor(alpha)
        # need y with x * y^-1 = a, i.e. y = a^-1 * x
        y = grp.mul(grp.inv(a), x)
        nxt = g.s_by_label[s].get(y)
        if nxt is None:
            return False
        v = nxt
    return v == g.base


def _letter(grp, x, y):
    return grp.mul(x, grp.inv(y))


def spanning_generators(g: AGraph, spec: FreeProductSpec, base=None) -> list[Word]:
    """Free basis of the subgroup at ``base`` read off a BFS spanning tree."""
    if base is None:
        base = g.base if g.base is not None else g.primary[0]
    # tree path words from base to every primary; entry[s] is the primary
    # through which the BFS first reached secondary s
    path = {base: ()}
    entry = {}
    tree_edges = set()
    queue = deque([base])
    while queue:
        p = queue.popleft()
        for s, x in sorted(g.p_adj[p], key=lambda sl: _sort_key(sl[0])):
            if s in entry:
                continue
            entry[s] = p
            tree_edges.add((p, s))
            alpha = g.sec_type[s]
            grp = spec.factor(alpha)
            for q, y in sorted(g.s_adj[s], key=lambda ql: _sort_key(ql[0])):
                if q == p or q in path:
                    continue
                tree_edges.add((q, s))
                path[q] = path[p] + ((alpha, _letter(grp, x, y)),)
                queue.append(q)
    gens = []
    lab = {(p, s): l for p, s, l in g.edges}
    for p, s, l in g.edges:
        if (p, s) in tree_edges:
            continue
        alpha = g.sec_type[s]
        grp = spec.factor(alpha)
        q = entry[s]
        # base -> p, then p -> s -> q, then q -> base
        mid = ((alpha, _letter(grp, l, lab[(q, s)])),)
        back = tuple((a, spec.factor(a).inv(x)) for a, x in reversed(path[q]))
        gens.append(normalize_word(path[p] + mid + back, spec))
    return gens


# ---------------------------------------------------------------------------
# canonical forms

def _bfs_code(g: AGraph, start, spec: FreeProductSpec | None, normalize: bool):
    num_p = {start: 0}
    num_s = {}
    code = []
    queue = deque([("p", start)])
    while queue:
        kind, v = queue.popleft()
        if kind == "p":
            row = []
            for alpha, (s, x) in sorted(g.p_by_type[v].items()):
                if s not in num_s:
                    if normalize:
                        grp = spec.factor(alpha)
                        shift = grp.inv(x)
                    else:
                        shift = None
                    num_s[s] = (len(num_s), shift)
                    queue.append(("s", s))
                row.append((alpha, num_s[s][0]))
            code.append(("p", tuple(row)))
        else:
            alpha = g.sec_type[v]
            shift = num_s[v][1]
            grp = spec.factor(alpha) if spec is not None else None
            items = []
            for q, x in g.s_adj[v]:
                y = grp.mul(x, shift) if shift is not None else x
                key = grp.element_key(y) if grp is not None else y
                items.append((key, q))
            items.sort(key=lambda kq: kq[0])
            row = []
            for key, q in items:
                if q not in num_p:
                    num_p[q] = len(num_p)
                    queue.append(("p", q))
                row.append((key, num_p[q]))
            code.append(("s", alpha, tuple(row)))
    return tuple(code), num_p, num_s


def canonical_form(g: AGraph, spec: FreeProductSpec | None = None, normalize_labels: bool = True):
    """Isomorphism invariant of an irreducible graph.

    With ``normalize_labels`` the labels at each secondary are taken up to
    a common right translation, which does not change the subgroup.
    Disconnected graphs give the sorted tuple of component codes.
    """
    if normalize_labels and spec is None:
        raise ValueError("label normalization needs the factor groups")
    codes = []
    for c in components(g):
        starts = c.primary
        best = min(_bfs_code(c, p, spec, normalize_labels)[0] for p in starts)
        codes.append(best)
    return tuple(sorted(codes))


def isomorphic(g: AGraph, h: AGraph, spec: FreeProductSpec | None = None,
               normalize_labels: bool = True) -> bool:
    return canonical_form(g, spec, normalize_labels) == canonical_form(h, spec, normalize_labels)


def canonical_graph(g: AGraph, spec: FreeProductSpec) -> AGraph:
    """Connected ``g`` relabelled by its canonical BFS numbering, labels normalized."""
    if not is_connected(g):
        raise ValueError("canonical_graph expects a connected graph")
    best = None
    for p in g.primary:
        code, num_p, num_s = _bfs_code(g, p, spec, True)
        if best is None or code < best[0]:
            best = (code, num_p, num_s)
    _, num_p, num_s = best
    edges = []
    for p, s, x in g.edges:
        grp = spec.factor(g.sec_type[s])
        edges.append((num_p[p], num_s[s][0], grp.mul(x, num_s[s][1])))
    sec = [(num_s[s][0], t) for s, t in g.secondary]
    base = num_p[g.base] if g.base is not None else None
    return AGraph.build(num_p.values(), sec, edges, base)


def relabel_ints(g: AGraph) -> tuple[AGraph, dict, dict]:
    """Replace ids by 0..n-1 in sorted order; returns maps old -> new."""
    mp = {p: i for i, p in enumerate(g.primary)}
    ms = {s: i for i, (s, _) in enumerate(g.secondary)}
    out = AGraph.build(mp.values(), [(ms[s], t) for s, t in g.secondary],
                       [(mp[p], ms[s], l) for p, s, l in g.edges],
                       mp[g.base] if g.base is not None else None)
    return out, mp, ms


# ---------------------------------------------------------------------------
# disjoint unions and JSON

def disjoint_union(*graphs: AGraph) -> AGraph:
    prim, sec, edges = [], [], []
    offp = offs = 0
    for g in graphs:
        h, mp, ms = relabel_ints(g)
        prim += [p + offp for p in h.primary]
        sec += [(s + offs, t) for s, t in h.secondary]
        edges += [(p + offp, s + offs, l) for p, s, l in h.edges]
        offp += len(h.primary)
        offs += len(h.secondary)
    return AGraph.build(prim, sec, edges, None)


def _label_to_json(x):
    if isinstance(x, tuple):
        return [list(l) for l in x]
    return x


def _label_from_json(x):
    if isinstance(x, list):
        return tuple((int(f), _label_from_json(e)) for f, e in x)
    return x


def graph_to_json(g: AGraph) -> dict:
    out = {
        "primary": list(g.primary),
        "secondary": [{"id": s, "type": t} for s, t in g.secondary],
        "edges": [[p, s, _label_to_json(l)] for p, s, l in g.edges],
    }
    if g.base is not None:
        out["base"] = g.base
    return out


def graph_from_json(data: dict) -> AGraph:
    sec = [(d["id"], int(d["type"])) for d in data["secondary"]]
    edges = [(p, s, _label_from_json(l)) for p, s, l in data["edges"]]
    g = AGraph.build(data["primary"], sec, edges, data.get("base"))
    ps, ss = set(g.primary), set(g.sec_type)
    for p, s, _ in g.edges:
        if p not in ps or s not in ss:
            raise ValueError(f"edge {p!r}-{s!r} has an unknown endpoint")
    return g


def graph_is_valid_over(g: AGraph, spec: FreeProductSpec) -> bool:
    """Types index factors and labels are elements of the right factor."""
    for s, t in g.secondary:
        if not 1 <= t <= spec.m:
            return False
    for p, s, l in g.edges:
        grp = spec.factor(g.sec_type[s])
        if hasattr(grp, "order") and isinstance(l, int) and not 0 <= l < grp.order:
            return False
    return True
