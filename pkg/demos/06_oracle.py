# coding: utf-8

# # Brute force from below
#
# Enumerate every small irreducible graph over C3*C3 and keep the best
# ratio against K1.  These are lower bounds; the LP value is the ceiling.

import time

from wncoeff.groups import free_product
from wncoeff.agraph import core, subgroup_graph
from wncoeff.oracle import enumerate_bd_graphs, ratio_table

spec = free_product(3, 3)
k1 = core(subgroup_graph([[(1, 2), (2, 1)], [(1, 1), (2, 2)]], spec).graph)

t = time.time()
graphs = list(enumerate_bd_graphs(spec, 3, 4))
print(len(graphs), "graphs with at most 4 secondaries, %.1fs" % (time.time() - t))

for row in ratio_table(k1, spec, 3, 4):
    print(row)
