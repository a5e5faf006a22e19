# coding: utf-8

# # The exact linear program
#
# Every admissible function on Y1 gives one inequality.  Maximizing -x_s
# subject to all of them yields -sigma_d * brr(Y1), and the dual vertex
# certifies the value.  Everything is in exact rationals.

import random

from wncoeff.groups import free_product
from wncoeff.agraph import core, is_connected, reduced_rank, subgroup_graph
from wncoeff.sli import enumerate_sli_finite
from wncoeff.lp import primal_point, solve_sli, to_lp_text, sli_problem

spec = free_product(3, 3)
k1 = core(subgroup_graph([[(1, 2), (2, 1)], [(1, 1), (2, 2)]], spec).graph)

sys_ = enumerate_sli_finite(k1, 3, spec)
print(len(sys_.inequalities), "inequalities")
print(sys_.inequalities[0].text())

res = solve_sli(sys_)
print("sigma_3 =", res.sigma, " primal", res.primal_value, " dual", res.dual_value)

# The primal point has x_s = 3 and the dual puts weight 1/2 on two rows.

x, xs = primal_point(res, sys_)
xs, {j: str(v) for j, v in enumerate(res.dual_y) if v}

# Over C3*C3 the value is 3 for every noncyclic factor-free subgroup.
# A random one:

rng = random.Random(4)
while True:
    w = [[(1 + (i % 2), rng.randrange(1, 3)) for i in range(rng.randint(2, 6))] for _ in range(2)]
    r = subgroup_graph(w, spec)
    if r.factor_free:
        y = core(r.graph)
        if reduced_rank(y) > 0 and is_connected(y) and len(y.primary) <= 6:
            break
print(len(y.primary), "primaries, sigma_3 =", solve_sli(enumerate_sli_finite(y, 3, spec)).sigma)

# The LP can be exported in a plain text form for inspection.

print(to_lp_text(sli_problem(sys_), "K1")[:300])
