"""Exact arc-flow solver: column generation, certified duals, reduced-cost
variable fixing and a short arc-family branching chain over acyclic networks."""

from .branching import SolveConfig, SolveReport, lift_branch_set, nf_solve, select_branch_set
from .colgen import ARC_FLOW, PATH_FLOW, DualSolution, MasterState, price_multi, safe_round, solve_master
from .lp import LpModel, LpResult
from .milp import MilpResult, bb_solve, export_mps
from .network import Arc, ArcFlowSolution, Network, Path, SideSystem, decompose_flow, validate_network
from .rcvf import FixingReport, fix_by_threshold, strategy1, strategy2, strategy3

__version__ = "0.1.0"

__all__ = [
    "ARC_FLOW",
    "PATH_FLOW",
    "Arc",
    "ArcFlowSolution",
    "DualSolution",
    "FixingReport",
    "LpModel",
    "LpResult",
    "MasterState",
    "MilpResult",
    "Network",
    "Path",
    "SideSystem",
    "SolveConfig",
    "SolveReport",
    "bb_solve",
    "decompose_flow",
    "export_mps",
    "fix_by_threshold",
    "lift_branch_set",
    "nf_solve",
    "price_multi",
    "safe_round",
    "select_branch_set",
    "solve_master",
    "strategy1",
    "strategy2",
    "strategy3",
    "validate_network",
]
