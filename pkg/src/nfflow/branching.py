"""The exact driver: column generation, variable fixing and a short branching chain.

At every level the arcs of all family groups that carry no LP flow form a set
``B``. The left child forbids ``B`` entirely and is handed to the MILP solver,
which is usually easy because the LP support is all that remains. The right
child requires at least one unit of flow on ``B`` (a covering row), is
re-solved by column generation, pruned by its certified bound and reduced by
fixing. After ``K`` levels the last right child is solved as a MILP.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Any, Sequence

from .colgen import PATH_FLOW, MasterState
from .errors import MasterInfeasible, TimeLimit
from .milp import TIME_LIMIT_STATUS, bb_solve
from .network import FLOW_TOL, ArcFlowSolution, Network, Path, SideSystem, decompose_flow
from .problems.families import ArcFamily
from .rcvf import FixingReport, strategy1, strategy2, strategy3

OPTIMAL = "Optimal"
FEASIBLE = "Feasible"
INFEASIBLE = "Infeasible"

RCVF_CHOICES = ("off", "1", "12", "123")


@dataclass
class BranchNode:
    level: int
    side: str  # "root", "left" or "right"
    removed: frozenset[int] = frozenset()
    rows: tuple[frozenset[int], ...] = ()
    bound: Any = -math.inf


@dataclass
class SolveConfig:
    levels: int = 10
    rcvf: str = "123"
    mode: str = PATH_FLOW
    time_limit: float | None = None
    arc_budget: int | None = None

    def __post_init__(self):
        if self.levels < 1:
            raise ValueError("at least one branching level is required")
        if self.rcvf not in RCVF_CHOICES:
            raise ValueError(f"rcvf must be one of {RCVF_CHOICES}")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time limit must be positive")


@dataclass
class LevelStats:
    level: int
    branch_set: int
    lifted: int
    left_status: str | None = None
    left_nodes: int = 0
    right_bound: float | None = None
    arcs_removed: int = 0
    milp_nodes: int = 0

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "branch_set": self.branch_set,
            "lift_reduction": self.branch_set - self.lifted,
            "left_status": self.left_status,
            "left_milp_nodes": self.left_nodes,
            "right_bound": self.right_bound,
            "arcs_removed": self.arcs_removed,
            "milp_nodes": self.milp_nodes,
        }


@dataclass
class SolveReport:
    status: str
    optimum: int | None
    bound: float
    incumbent: list[tuple[Path, int]] | None
    improved: bool
    root_bound: float | None = None
    root_lp: float | None = None
    levels: list[LevelStats] = field(default_factory=list)
    fixing: list[FixingReport] = field(default_factory=list)
    final_milp_nodes: int = 0
    closed_at: str = ""
    arcs: int = 0
    live_arcs_after_root: int = 0
    timings: dict[str, float] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "optimum": self.optimum,
            "bound": self.bound,
            "closed_at": self.closed_at,
            "root_lp": self.root_lp,
            "root_bound": self.root_bound,
            "arcs": self.arcs,
            "live_arcs_after_root": self.live_arcs_after_root,
            "levels": [s.to_json() for s in self.levels],
            "fixing": [f.to_json() for f in self.fixing],
            "final_milp_nodes": self.final_milp_nodes,
            "timings": self.timings,
        }


def select_branch_set(family: ArcFamily, flows: dict[int, float], net: Network) -> set[int]:
    """Live arcs of every group whose total LP flow is zero."""
    out: set[int] = set()
    for g in family.groups:
        live = [a for a in g if net.is_live(a)]
        if live and sum(flows.get(a, 0.0) for a in live) <= FLOW_TOL:
            out.update(live)
    return out


def _reach_without(net: Network, blocked: set[int], forward: bool) -> list[bool]:
    n = len(net.nodes)
    seen = [False] * n
    order = net._topo_idx if forward else list(reversed(net._topo_idx))
    start = net.index[net.source if forward else net.sink]
    seen[start] = True
    incoming = net.in_arcs if forward else net.out_arcs
    other = net.tail_idx if forward else net.head_idx
    for i in order:
        if seen[i]:
            continue
        for a in incoming[i]:
            if a not in net.dead and a not in blocked and seen[other[a]]:
                seen[i] = True
                break
    return seen


def lift_branch_set(net: Network, branch: set[int]) -> set[int]:
    """Drop arcs of ``branch`` that no path can use as its first (or last) branch arc.

    A path through an arc whose tail cannot be reached from the source without
    passing another branch arc already uses an earlier branch arc, so requiring
    flow on the remaining arcs admits exactly the same integer solutions.
    The same argument is then applied from the sink.
    """
    branch = {a for a in branch if net.is_live(a)}
    fwd = _reach_without(net, branch, True)
    kept = {a for a in branch if fwd[net.tail_idx[a]]}
    bwd = _reach_without(net, kept, False)
    return {a for a in kept if bwd[net.head_idx[a]]}


def _has_path(net: Network) -> bool:
    reach = _reach_without(net, set(), True)
    return reach[net.index[net.sink]]


def _integer_paths(net: Network, sol: ArcFlowSolution) -> list[tuple[Path, int]]:
    return [(p, int(k)) for p, k in decompose_flow(net, sol)]


def nf_solve(net: Network, sides: SideSystem, family: ArcFamily, z_ub0: int, K: int | None = None,
             config: SolveConfig | None = None, pool: Sequence[Path] = (),
             incumbent: list[tuple[Path, int]] | None = None) -> SolveReport:
    """Prove optimality of, or improve on, an incumbent of value ``z_ub0``.

    ``net`` is not modified. Only solutions better than the current incumbent
    are searched for, so a network that keeps every improving solution (such
    as the waste-limited one) is sufficient.
    """
    config = config or SolveConfig()
    if K is not None:
        config = SolveConfig(K, config.rcvf, config.mode, config.time_limit, config.arc_budget)
    t_start = time.monotonic()
    deadline = None if config.time_limit is None else t_start + config.time_limit
    timings: dict[str, float] = {}
    report = SolveReport(FEASIBLE, None, -math.inf, incumbent, False, arcs=net.num_live, timings=timings)
    z_ub = z_ub0
    best_bound = -math.inf
    work = net.copy()

    def finish(status: str, where: str) -> SolveReport:
        report.status = status
        report.closed_at = where
        report.optimum = z_ub if status == OPTIMAL else None
        if status == OPTIMAL:
            report.bound = z_ub
        else:
            report.bound = best_bound
        report.timings["total"] = time.monotonic() - t_start
        return report

    def take(res, on: Network) -> None:
        nonlocal z_ub
        if res.found and res.value < z_ub:
            z_ub = res.value
            report.incumbent = _integer_paths(on, res.solution)
            report.improved = True

    def closed() -> bool:
        return best_bound > -math.inf and math.ceil(best_bound) >= z_ub

    try:
        t0 = time.monotonic()
        state = MasterState(work, sides, config.mode, pool)
        try:
            state.solve(deadline)
        except MasterInfeasible:
            timings["root"] = time.monotonic() - t0
            return finish(OPTIMAL if z_ub < math.inf else INFEASIBLE, "root (no improving LP solution)")
        timings["root"] = time.monotonic() - t0
        report.root_lp = float(state.objective)
        if state.dual.safe:
            best_bound = state.dual.bound
            report.root_bound = float(best_bound)
        if closed():
            return finish(OPTIMAL, "root")

        t0 = time.monotonic()
        try:
            if config.rcvf != "off":
                report.fixing.append(strategy1(state, z_ub))
            if config.rcvf in ("12", "123"):
                report.fixing.append(strategy2(state, z_ub, deadline))
        except MasterInfeasible:
            return finish(OPTIMAL, "root fixing")
        timings["root_fixing"] = time.monotonic() - t0
        report.live_arcs_after_root = state.net.num_live
        if state.dual.safe:
            best_bound = max(best_bound, state.dual.bound)
        if closed() or not _has_path(state.net):
            return finish(OPTIMAL, "root fixing")
        ceil_root = math.ceil(best_bound) if best_bound > -math.inf else -math.inf

        for level in range(1, config.levels + 1):
            branch = select_branch_set(family, state.arc_flows(), state.net)
            if not branch:
                res = bb_solve(state.net, state.sides, cutoff=z_ub - 1, deadline=deadline)
                take(res, state.net)
                report.final_milp_nodes = res.nodes
                if res.status == TIME_LIMIT_STATUS:
                    raise TimeLimit("time limit reached in the final MILP")
                return finish(OPTIMAL, f"level {level} (no branching set)")
            lifted = lift_branch_set(state.net, branch)
            stats = LevelStats(level, len(branch), len(lifted))
            report.levels.append(stats)

            t0 = time.monotonic()
            left = state.net.copy()
            left.kill(branch)
            res = bb_solve(left, state.sides, cutoff=z_ub - 1, deadline=deadline)
            stats.left_status, stats.left_nodes = res.status, res.nodes
            take(res, left)
            timings[f"left_{level}"] = time.monotonic() - t0
            if res.status == TIME_LIMIT_STATUS:
                raise TimeLimit("time limit reached in a left branch")
            if z_ub <= ceil_root:
                return finish(OPTIMAL, f"left {level}")

            t0 = time.monotonic()
            state.add_cover_row(lifted)
            try:
                state.solve(deadline)
            except MasterInfeasible:
                return finish(OPTIMAL, f"right {level} infeasible")
            if state.dual.safe:
                stats.right_bound = float(state.dual.bound)
                if math.ceil(state.dual.bound) >= z_ub:
                    return finish(OPTIMAL, f"right {level} pruned")
            before = state.net.num_live
            try:
                if level < config.levels:
                    if config.rcvf != "off":
                        fx = strategy1(state, z_ub)
                        report.fixing.append(fx)
                        if fx.basic_removals:
                            state.solve(deadline)
                else:
                    if config.rcvf == "123":
                        report.fixing.append(strategy3(state, z_ub, config.arc_budget, deadline))
            except MasterInfeasible:
                return finish(OPTIMAL, f"right {level} fixing")
            stats.arcs_removed = before - state.net.num_live
            timings[f"right_{level}"] = time.monotonic() - t0
            if (state.dual.safe and math.ceil(state.dual.bound) >= z_ub) or not _has_path(state.net):
                return finish(OPTIMAL, f"right {level} fixing")
            if level == config.levels:
                t0 = time.monotonic()
                res = bb_solve(state.net, state.sides, cutoff=z_ub - 1, deadline=deadline)
                take(res, state.net)
                stats.milp_nodes = res.nodes
                report.final_milp_nodes = res.nodes
                timings["final_milp"] = time.monotonic() - t0
                if res.status == TIME_LIMIT_STATUS:
                    raise TimeLimit("time limit reached in the final MILP")
                return finish(OPTIMAL, f"level {level} MILP")
    except TimeLimit:
        return finish(FEASIBLE, "time limit")
    return finish(OPTIMAL, "levels exhausted")
