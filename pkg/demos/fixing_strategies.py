"""Compare the three reduced-cost fixing strategies on random instances.

Strategy 1 uses the final column generation dual, strategy 2 searches for a
slightly sub-optimal dual that cuts LP-support arcs, and strategy 3 re-solves
the master with single fractional arcs forced to carry flow.

    python demos/fixing_strategies.py
"""

import numpy as np

from nfflow import solve_master
from nfflow.problems import build_csp_standard, generate_random
from nfflow.rcvf import strategy1, strategy2, strategy3


def removed(inst, z_ub, which):
    net, sides = build_csp_standard(inst)
    state = solve_master(net, sides)
    total = strategy1(state, z_ub).total_removed
    if "2" in which:
        total += strategy2(state, z_ub).total_removed
    if "3" in which:
        total += strategy3(state, z_ub, arc_budget=0).total_removed
    return total, net.num_live + total


rows = []
for seed in range(40):
    inst = generate_random("csp", 8, 30, (4, 20), (1, 3), seed=seed)
    net, sides = build_csp_standard(inst)
    z_ub = solve_master(net, sides).dual.ceil_bound + 1
    counts = [removed(inst, z_ub, w)[0] for w in ("1", "12", "123")]
    rows.append([len(net.arcs)] + counts)

rows = np.array(rows)
print("arcs   s1   s12  s123")
for r in rows[:10]:
    print(" ".join(f"{v:4d}" for v in r))
share = rows[:, 1:] / rows[:, [0]]
print(f"mean share removed: s1 {share[:, 0].mean():.2%}, s12 {share[:, 1].mean():.2%}, "
      f"s123 {share[:, 2].mean():.2%}")
