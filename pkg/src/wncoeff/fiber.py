"""Fiber products of irreducible graphs and the rank of generalized intersections."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .agraph import AGraph, EmptyCore, components, core, reduced_rank
from .groups import FreeProductSpec


class NoPositiveRankComponent(ValueError):
    pass


def nontrivial_element(grp):
    """The fixed nontrivial element of a factor: the second one enumerated."""
    return next(itertools.islice(grp.elements(), 1, None))


@dataclass(frozen=True)
class FiberCore:
    """Core of the fiber product with both projections.

    ``pairs[p]`` is the pair ``(v1, v2)`` over primary ``p`` and
    ``sec_pairs[s]`` the pair ``(w1, w2)`` over secondary ``s``.
    """

    graph: AGraph
    pairs: dict = field(default_factory=dict)
    sec_pairs: dict = field(default_factory=dict)

    def tau(self, i: int):
        """Vertex maps of projection ``i`` (1 or 2) as (primary, secondary) dicts."""
        k = i - 1
        return ({p: vv[k] for p, vv in self.pairs.items()},
                {s: ww[k] for s, ww in self.sec_pairs.items()})

    def edge_image(self, i: int) -> set:
        k = i - 1
        return {(self.pairs[p][k], self.sec_pairs[s][k]) for p, s, _ in self.graph.edges}

    def brr(self) -> int:
        return reduced_rank(self.graph) if self.graph.primary else 0

    def component_table(self) -> list[dict]:
        rows = []
        if not self.graph.primary:
            return rows
        for c in components(self.graph):
            rows.append({
                "min_pair": list(self.pairs[c.primary[0]]),
                "primary": len(c.primary),
                "secondary": len(c.secondary),
                "brr": max(0, c.n_edges - c.n_vertices),
            })
        return rows


def fiber_product(y1: AGraph, y2: AGraph, spec: FreeProductSpec):
    """Uncored fiber product: graph plus pair maps, before pruning."""
    pairs = list(itertools.product(y1.primary, y2.primary))
    pid = {pr: i for i, pr in enumerate(pairs)}
    classes: dict = {}
    edges = []
    types = sorted(y1.types() | y2.types())
    for alpha in types:
        grp = spec.factor(alpha)
        for v1, v2 in pairs:
            h1 = y1.p_by_type[v1].get(alpha)
            h2 = y2.p_by_type[v2].get(alpha)
            if h1 is None and h2 is None:
                continue
            if h1 is not None and h2 is not None:
                (w1, l1), (w2, l2) = h1, h2
                # (v1,v2) ~ (v1',v2') iff l1 l1'^-1 = l2 l2'^-1 at the same w1, w2,
                # i.e. iff l2^-1 l1 agrees
                key = (alpha, w1, w2, grp.mul(grp.inv(l2), l1))
                label = l1
                over = (w1, w2)
            else:
                key = ("single", alpha, v1, v2)
                label = h1[1] if h1 is not None else nontrivial_element(grp)
                over = None
            if key not in classes:
                classes[key] = (len(classes), alpha, over)
            edges.append((pid[(v1, v2)], classes[key][0], label))
    sec = [(i, a) for i, a, _ in classes.values()]
    g = AGraph.build(pid.values(), sec, edges, None)
    pair_of = {i: pr for pr, i in pid.items()}
    sec_of = {i: over for i, _, over in classes.values()}
    return g, pair_of, sec_of


def fiber_core(y1: AGraph, y2: AGraph, spec: FreeProductSpec) -> FiberCore:
    """core(y1 x y2) with projections; may be the empty graph."""
    g, pair_of, sec_of = fiber_product(y1, y2, spec)
    try:
        c = core(g)
    except EmptyCore:
        return FiberCore(AGraph((), (), ()), {}, {})
    pairs = {p: pair_of[p] for p in c.primary}
    sec_pairs = {s: sec_of[s] for s, _ in c.secondary}
    return FiberCore(c, pairs, sec_pairs)


def brr_generalized_intersection(y1: AGraph, y2: AGraph, spec: FreeProductSpec) -> int:
    """Reduced rank of the generalized intersection: -chi of the fiber core."""
    return fiber_core(y1, y2, spec).brr()


def _is_core(g: AGraph) -> bool:
    try:
        return core(g) == g.with_base(None)
    except EmptyCore:
        return False


def tau2_surjective(fc: FiberCore, y2: AGraph) -> bool:
    pm, sm = fc.tau(2)
    if set(pm.values()) != set(y2.primary):
        return False
    if set(sm.values()) != set(y2.sec_type):
        return False
    return fc.edge_image(2) == {(p, s) for p, s, _ in y2.edges}


def has_property_B(y1: AGraph, y2: AGraph, spec: FreeProductSpec) -> bool:
    if not y2.primary or not _is_core(y2) or reduced_rank(y2) <= 0:
        return False
    return tau2_surjective(fiber_core(y1, y2, spec), y2)


def has_property_Bd(y1: AGraph, y2: AGraph, d: int, spec: FreeProductSpec) -> bool:
    """(B) plus max vertex degree of ``y2`` at most ``d``."""
    if y2.max_degree() > d:
        return False
    return has_property_B(y1, y2, spec)


def ratio(y1: AGraph, y2: AGraph, spec: FreeProductSpec) -> Fraction:
    """brr(core(y1 x y2)) / (brr(y1) brr(y2))."""
    return Fraction(brr_generalized_intersection(y1, y2, spec),
                    reduced_rank(y1) * reduced_rank(y2))


def image_subgraph(fc: FiberCore, y2: AGraph) -> AGraph:
    pm, sm = fc.tau(2)
    ps = set(pm.values())
    ss = set(sm.values())
    es = fc.edge_image(2)
    return AGraph.build(ps, [(s, t) for s, t in y2.secondary if s in ss],
                        [e for e in y2.edges if (e[0], e[1]) in es], None)


def trim_to_surjective(y1: AGraph, y2: AGraph, spec: FreeProductSpec) -> AGraph:
    """Best component of the projection image, by ratio against ``y1``.

    Returns ``y2`` itself when the projection is onto and ``y2`` is connected.
    """
    if reduced_rank(y2) <= 0:
        raise NoPositiveRankComponent("y2 has reduced rank 0")
    fc = fiber_core(y1, y2, spec)
    if tau2_surjective(fc, y2) and len(components(y2)) == 1:
        return y2
    if not fc.graph.primary:
        raise NoPositiveRankComponent("fiber core is empty")
    img = image_subgraph(fc, y2)
    best = None
    for comp in components(img):
        r = reduced_rank(comp)
        if r <= 0:
            continue
        val = Fraction(brr_generalized_intersection(y1, comp, spec), r)
        if best is None or val > best[0]:
            best = (val, comp)
    if best is None:
        raise NoPositiveRankComponent("no image component of positive rank")
    return best[1]
