import random

import pytest
from hypothesis import given, strategies as st

from wncoeff.agraph import (
    AGraph,
    components,
    core,
    disjoint_union,
    irreducibility_violations,
    isomorphic,
    reduced_rank,
    subgroup_graph,
)
from wncoeff.fiber import (
    NoPositiveRankComponent,
    brr_generalized_intersection,
    fiber_core,
    has_property_B,
    has_property_Bd,
    ratio,
    trim_to_surjective,
)
from wncoeff.groups import q_ratio, q_star

from support import C23, C24, C33, graph_of, k1, naive_fiber_brr, rand_sub, rand_word

CYC = [[(1, 1), (2, 1)]]


def cyc():
    return graph_of(CYC, C33)


def test_k1_self_product():
    fc = fiber_core(k1(), k1(), C33)
    # frozen from the pairwise oracle below
    assert fc.brr() == 3
    assert naive_fiber_brr(k1(), k1(), C33) == 3
    comps = components(fc.graph)
    assert len(comps) == 3
    assert any(isomorphic(c, k1(), C33) for c in comps)
    diag = {p for p, (a, b) in fc.pairs.items() if a == b}
    assert diag and all(len(c.primary) == 3 for c in comps)


def test_diagonal_projects_isomorphically():
    g = k1()
    fc = fiber_core(g, g, C33)
    pm, _ = fc.tau(2)
    for c in components(fc.graph):
        ps = c.primary
        if all(fc.pairs[p][0] == fc.pairs[p][1] for p in ps):
            assert sorted(pm[p] for p in ps) == sorted(g.primary)
            break
    else:
        pytest.fail("no diagonal component")


def test_against_cycle():
    assert brr_generalized_intersection(k1(), cyc(), C33) == 0
    assert naive_fiber_brr(k1(), cyc(), C33) == 0
    for c in components(fiber_core(k1(), cyc(), C33).graph):
        assert reduced_rank(c) == 0


def test_property_bd_examples():
    assert has_property_Bd(k1(), k1(), 3, C33)
    assert not has_property_Bd(k1(), cyc(), 3, C33)
    assert not has_property_Bd(k1(), k1(), 2, C33)


def test_trim_examples():
    assert trim_to_surjective(k1(), k1(), C33) == k1()
    u = disjoint_union(k1(), cyc())
    t = trim_to_surjective(k1(), u, C33)
    assert isomorphic(t, k1(), C33)
    with pytest.raises(NoPositiveRankComponent):
        trim_to_surjective(k1(), cyc(), C33)


def test_trim_improves_ratio():
    # Y2 = Y1 plus one more generator: the new handle is not covered
    rng = random.Random(11)
    done = 0
    for _ in range(400):
        gens, y1 = rand_sub(rng, C33, maxvp=6)
        w = rand_word(rng, C33, rng.randint(3, 6))
        v = subgroup_graph(gens + [w], C33)
        if not v.factor_free:
            continue
        y2 = core(v.graph)
        if reduced_rank(y2) <= reduced_rank(y1) or has_property_B(y1, y2, C33):
            continue
        t = trim_to_surjective(y1, y2, C33)
        assert has_property_B(y1, t, C33)
        assert ratio(y1, t, C33) > ratio(y1, y2, C33)
        done += 1
    assert done >= 3


pairs = [(C33, 3, 6), (C23, 5, 6), (C24, 7, 6)]


@pytest.mark.parametrize("spec,seed,vp", pairs)
def test_against_pairwise_oracle(spec, seed, vp):
    rng = random.Random(seed)
    for _ in range(8):
        _, y1 = rand_sub(rng, spec, maxvp=vp)
        _, y2 = rand_sub(rng, spec, maxvp=vp)
        assert brr_generalized_intersection(y1, y2, spec) == naive_fiber_brr(y1, y2, spec)


@given(st.integers(0, 10 ** 6))
def test_symmetry_and_bound(seed):
    rng = random.Random(seed)
    spec = rng.choice([C33, C23, C24])
    _, y1 = rand_sub(rng, spec, maxvp=6)
    _, y2 = rand_sub(rng, spec, maxvp=6)
    b = brr_generalized_intersection(y1, y2, spec)
    assert b == brr_generalized_intersection(y2, y1, spec)
    assert b <= 2 * q_ratio(q_star(spec)) * reduced_rank(y1) * reduced_rank(y2)
    fc = fiber_core(y1, y2, spec)
    if fc.graph.primary:
        assert irreducibility_violations(fc.graph) == []
        assert core(fc.graph) == fc.graph


def test_component_table_is_sorted():
    rows = fiber_core(k1(), k1(), C33).component_table()
    assert [r["min_pair"] for r in rows] == sorted(r["min_pair"] for r in rows)
    assert sum(r["brr"] for r in rows) == 3


def test_empty_fiber():
    # one side only uses type 1 edges of a different pattern: nothing survives
    y = AGraph.build([0, 1], [(0, 1), (1, 2)], [(0, 0, 0), (1, 0, 1), (0, 1, 0), (1, 1, 1)], None)
    fc = fiber_core(k1(), y, C33)
    assert fc.brr() == 0
