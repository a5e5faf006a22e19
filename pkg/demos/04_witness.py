# coding: utf-8

# # Building the extremal subgroup
#
# Scaling the optimal dual vertex to coprime integers tells how many copies
# of each inequality to use.  Each copy is a secondary vertex with its
# labels; the balanced left sides let us match the edge ends into primaries.

from wncoeff.groups import free_product
from wncoeff.agraph import core, subgroup_graph
from wncoeff.sli import enumerate_sli_finite
from wncoeff.lp import solve_sli
from wncoeff.witness import witness_from_system

for orders, gens in [((3, 3), [[(1, 2), (2, 1)], [(1, 1), (2, 2)]]),
                     ((2, 4), [[(1, 1), (2, 1), (1, 1), (2, 2)], [(1, 1), (2, 3), (1, 1), (2, 1)]])]:
    spec = free_product(*orders)
    y1 = core(subgroup_graph(gens, spec).graph)
    d = max(3, *orders)
    sys_ = enumerate_sli_finite(y1, d, spec)
    res = solve_sli(sys_)
    w, rep, q = witness_from_system(sys_, spec, res)
    print(orders, "sigma =", res.sigma, "| witness", len(w.primary), "primary,",
          len(w.secondary), "secondary | eta", q.eta, "C", q.C)
    print("   brr(core) =", rep.brr_fiber, "=", rep.sigma, "*", rep.brr_y1, "*", rep.brr_y2,
          "| connected", rep.connected, "| ok", rep.ok)
