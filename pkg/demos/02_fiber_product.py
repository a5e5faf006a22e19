# coding: utf-8

# # Generalized intersections
#
# The fiber product of two subgroup graphs, cut down to its core, carries
# the sum of reduced ranks of all intersections H1 ∩ gH2g^-1.

from wncoeff.groups import free_product
from wncoeff.agraph import core, subgroup_graph
from wncoeff.fiber import fiber_core, ratio

spec = free_product(3, 3)
k1 = core(subgroup_graph([[(1, 2), (2, 1)], [(1, 1), (2, 2)]], spec).graph)

fc = fiber_core(k1, k1, spec)
print("brr of the core:", fc.brr())
for row in fc.component_table():
    print(row)

# Three components, each of reduced rank 1.  Dividing by brr(H1) brr(H2)
# gives the ratio that the linear program maximizes.

ratio(k1, k1, spec)
