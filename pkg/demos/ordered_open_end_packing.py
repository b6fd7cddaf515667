"""Ordered open-end bin packing on a sequence network.

Items arrive in a fixed order and the last item of a bin may overflow the
capacity. The example shows why the LP relaxation is weaker than the integer
optimum and how branching on single arcs closes the gap.

    python demos/ordered_open_end_packing.py
"""

from nfflow import nf_solve, solve_master
from nfflow.problems import OoebppInstance, brute_force, build_ooebpp, make_family, next_fit_overflow
from nfflow.problems.ooebpp import decode_path

inst = OoebppInstance(W=10, seq=(6, 5, 9))
net, sides = build_ooebpp(inst)
print(f"sequence {inst.seq}, capacity {inst.W}: {len(net.nodes)} nodes, {len(net.arcs)} arcs")
print(net.dump())

heur = next_fit_overflow(inst)
print(f"next-fit-overflow: {len(heur)} bins {heur}")

state = solve_master(net.copy(), sides)
print(f"LP value {state.objective:.3f}, rounded-up bound {state.dual.ceil_bound}")
for path, lam in state.path_solution():
    print(f"  {lam:.2f} x bin with items {decode_path(net, path)}")

# start from a deliberately weak bound so the driver has to find the solution
report = nf_solve(net, sides, make_family("singleton", net), len(heur) + 1)
print(f"{report.status}: {report.optimum} bins (brute force {brute_force(inst)})")
for path, k in report.incumbent:
    print(f"  {k} x bin with items {decode_path(net, path)}")
