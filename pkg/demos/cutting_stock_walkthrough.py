"""Solve a small cutting stock instance step by step.

Builds both position networks, runs column generation, certifies the dual,
removes arcs by reduced-cost fixing and finally proves optimality with the
branching driver.

    python demos/cutting_stock_walkthrough.py
"""

from nfflow import SolveConfig, nf_solve, solve_master
from nfflow.problems import (
    CspInstance,
    brute_force,
    build_csp_standard,
    build_csp_waste_limited,
    make_family,
    primal_heuristic,
)
from nfflow.problems.csp import decode_path
from nfflow.rcvf import strategy1, strategy2

inst = CspInstance(W=20, items=((9, 3), (8, 2), (7, 2), (6, 3), (5, 2), (4, 1)))
z_ub, rolls = primal_heuristic(inst)
print(f"first-fit decreasing: {z_ub} rolls {rolls}")

std, sides = build_csp_standard(inst)
lim, _ = build_csp_waste_limited(inst, z_ub=z_ub)
print(f"standard network: {len(std.nodes)} nodes, {std.num_live} arcs")
print(f"waste-limited network: {len(lim.nodes)} nodes, {lim.num_live} arcs")

# column generation on the standard network
state = solve_master(std.copy(), sides)
print(f"LP value {state.objective:.4f} after {state.iterations} pricing rounds")
print(f"certified bound {float(state.dual.bound):.6f}, ceiling {state.dual.ceil_bound}")
for path, lam in state.path_solution():
    print(f"  {lam:.3f} x {decode_path(std, path)}")

# fixing only helps when the ceiling is below the incumbent
gap_ub = max(z_ub, state.dual.ceil_bound + 1)
before = state.net.num_live
r1 = strategy1(state, gap_ub)
r2 = strategy2(state, gap_ub)
print(f"fixing with z_ub = {gap_ub}: {before} -> {state.net.num_live} arcs "
      f"(strategy 1: {r1.total_removed}, strategy 2: {r2.total_removed})")

report = nf_solve(std, sides, make_family("fa:1", std), z_ub, config=SolveConfig(levels=10))
print(f"{report.status}: {report.optimum} rolls, closed at {report.closed_at}")
print(f"brute force agrees: {brute_force(inst) == report.optimum}")
