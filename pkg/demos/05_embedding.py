# coding: utf-8

# # Three factors down to two
#
# Conjugating each letter by a cyclic shift of g1 g2 g3 embeds C2*C2*C2 in
# C2 * (C2*C2).  The second factor is infinite and is handled as a word
# oracle.  Reduced rank and degree come through unchanged.

from wncoeff.groups import free_product
from wncoeff.agraph import core, reduced_rank, subgroup_graph
from wncoeff.embed import EmbeddingSpec, mu2_graph, mu2_word
from wncoeff.fiber import brr_generalized_intersection

spec = free_product(2, 2, 2)
e = EmbeddingSpec(spec)
e.conjugator(1), e.conjugator(3)

mu2_word([(3, 1)], e)

h1 = core(subgroup_graph([[(3, 1), (1, 1)], [(3, 1), (2, 1), (3, 1), (1, 1), (2, 1)]], spec).graph)
h2 = core(subgroup_graph([[(2, 1), (3, 1)], [(1, 1), (2, 1)]], spec).graph)
img1, img2 = mu2_graph(h1, e), mu2_graph(h2, e)

print("brr", reduced_rank(h1), "->", reduced_rank(img1), "| deg", h1.max_degree(), "->", img1.max_degree())
print("primaries", len(h1.primary), "->", len(img1.primary))

# Intersections survive the embedding as well.

print(brr_generalized_intersection(h1, h2, spec), brr_generalized_intersection(img1, img2, e.target))
