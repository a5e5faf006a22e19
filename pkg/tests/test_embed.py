import random

import pytest
from hypothesis import given, strategies as st

from wncoeff.agraph import AGraph, contains, reduced_rank, spanning_generators, subgroup_graph
from wncoeff.embed import (
    EmbeddingSpec,
    compute_I,
    d_M,
    mu2_graph,
    mu2_word,
    mu_word,
    regroup,
    restrict_to_I,
    two_factor_pipeline,
    ungroup,
)
from wncoeff.groups import (
    free_product,
    normalize_word,
    word_inverse,
    word_mul,
)
from wncoeff.lp import solve_sli
from wncoeff.sli import enumerate_sli_finite

from support import C33, k1, rand_sub, rand_word

C222 = free_product(2, 2, 2)
C332 = free_product(3, 3, 2)
C2322 = free_product(2, 3, 2, 2)
E222 = EmbeddingSpec(C222)


def test_compute_I():
    assert compute_I(k1()) == {1, 2}
    g = AGraph.build([0], [(0, 3)], [(0, 0, 0), (0, 0, 1)], None)
    assert compute_I(g) == {3}


def test_spec_validation():
    with pytest.raises(ValueError):
        EmbeddingSpec(C33)
    with pytest.raises(ValueError):
        EmbeddingSpec(C332, (1, 0, 1))
    with pytest.raises(ValueError):
        EmbeddingSpec(C332, (1, 1))
    e = EmbeddingSpec(C332, (2, 1, 1))
    assert e.g == (2, 1, 1) and e.target.m == 2
    assert EmbeddingSpec(C332).g == (1, 1, 1)


def test_conjugators():
    assert E222.conjugator(1) == ((2, 1), (3, 1), (1, 1))
    assert E222.conjugator(2) == ((3, 1), (1, 1), (2, 1))
    assert E222.conjugator(3) == ((1, 1), (2, 1), (3, 1))


def test_letter_images():
    # a in G_3 goes to (g1 g2 g3)^-1 a (g1 g2 g3)
    assert mu_word([(3, 1)], E222) == ((3, 1), (2, 1), (1, 1), (3, 1), (1, 1), (2, 1), (3, 1))
    assert mu2_word([(3, 1)], E222) == (
        (2, ((2, 1), (1, 1))), (1, 1), (2, ((2, 1),)), (1, 1), (2, ((1, 1), (2, 1))))
    assert mu2_word([], E222) == ()


def test_regroup_roundtrip():
    w = ((2, 1), (3, 1), (1, 1), (3, 1))
    r = regroup(w, 3)
    assert r == ((2, ((1, 1), (2, 1))), (1, 1), (2, ((2, 1),)))
    assert ungroup(r) == w


words = st.lists(st.tuples(st.integers(1, 3), st.integers(1, 1)), max_size=8)


@given(words, words)
def test_homomorphism(u, v):
    src = E222.source
    tgt = E222.target
    lhs = mu2_word(word_mul(tuple(u), tuple(v), src), E222)
    rhs = word_mul(mu2_word(u, E222), mu2_word(v, E222), tgt)
    assert lhs == rhs


@given(words)
def test_injective_on_samples(u):
    # mu(u) is trivial only for trivial u
    assert (mu2_word(u, E222) == ()) == (normalize_word(u, C222) == ())


@given(words)
def test_inverse_commutes(u):
    assert mu2_word(word_inverse(normalize_word(u, C222), C222), E222) == \
        word_inverse(mu2_word(u, E222), E222.target)


@pytest.mark.parametrize("spec", [C222, C332, C2322], ids=["C2^3", "C3C3C2", "C2C3C2C2"])
def test_brr_and_degree_preserved(spec):
    e = EmbeddingSpec(spec)
    rng = random.Random(5)
    for _ in range(5):
        _, g = rand_sub(rng, spec, maxvp=7, ngen=3)
        h = mu2_graph(g, e)
        assert reduced_rank(h) == reduced_rank(g)
        assert h.max_degree() == g.max_degree()


def test_membership_transported():
    rng = random.Random(9)
    for _ in range(4):
        gens, g = rand_sub(rng, C332, maxvp=6)
        p0 = g.primary[0]
        based = g.with_base(p0)
        basis = spanning_generators(g, C332, base=p0)
        image = subgroup_graph([mu2_word(w, EmbeddingSpec(C332)) for w in basis],
                               EmbeddingSpec(C332).target).graph
        samples = [rand_word(rng, C332, rng.randint(1, 6)) for _ in range(30)]
        for _ in range(10):
            w = ()
            for _ in range(3):
                b = rng.choice(basis)
                w = word_mul(w, b if rng.random() < 0.5 else word_inverse(b, C332), C332)
            samples.append(w)
        hits = 0
        for w in samples:
            inside = contains(based, w, C332)
            hits += inside
            assert contains(image, mu2_word(w, EmbeddingSpec(C332)), EmbeddingSpec(C332).target) == inside
        assert hits >= 10


def test_restrict_and_d_M():
    g = AGraph.build(range(3), [(0, 1), (1, 3)],
                     [(p, 0, p) for p in range(3)] + [(p, 1, [0, 1, 0][p]) for p in range(3)], None)
    h, sub, idx = restrict_to_I(g, C332)
    assert idx == (1, 3) and sub.m == 2 and set(h.types()) == {1, 2}
    assert d_M(g, C332) == 3
    assert d_M(k1(), C33) == 3


def test_two_factor_pipeline_matches_direct():
    rep = two_factor_pipeline(k1(), C33)
    direct = solve_sli(enumerate_sli_finite(k1(), 3, C33)).sigma
    assert rep.sigma == direct == 3
    assert rep.conjecture_holds is True and rep.bound == 3
    assert rep.to_json()["sigma_d_hat"] == "3"
    # K1 placed on factors 1 and 2 of a three-factor group only uses two
    rep3 = two_factor_pipeline(k1(), C332)
    assert rep3.sigma == 3 and rep3.I == (1, 2) and rep3.g == ()
