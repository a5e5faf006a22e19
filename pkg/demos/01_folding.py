# coding: utf-8

# # Subgroup graphs over a free product
#
# A finitely generated subgroup of C3*C3 is drawn as a bipartite graph:
# primary vertices are cosets, secondary vertices carry one factor each.
# Folding a wedge of generator loops gives the irreducible graph, or a
# proof that the subgroup meets a conjugate of a factor.

from wncoeff.groups import free_product
from wncoeff.agraph import core, reduced_rank, subgroup_graph, contains

spec = free_product(3, 3)

# Words are tuples of (factor, element). Here a = (1, 1) and b = (2, 1).

gens = [[(1, 2), (2, 1)], [(1, 1), (2, 2)]]
res = subgroup_graph(gens, spec)
res.factor_free

g = res.graph
print(len(g.primary), "primary,", len(g.secondary), "secondary,", g.n_edges, "edges")

# The reduced rank E - V is 1 for this subgroup.

print("brr =", reduced_rank(core(g)))

# Membership is a walk from the base vertex.

print(contains(g, [(1, 2), (2, 1), (1, 1), (2, 2)], spec))
print(contains(g, [(1, 1)], spec))

# Two generators whose quotient lands in a factor: folding reports the clash.

bad = subgroup_graph([[(1, 1), (2, 1)], [(1, 2), (2, 1)]], spec)
print(bad)
