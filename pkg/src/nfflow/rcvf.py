"""Reduced-cost variable fixing.

Given a certified dual with objective ``bound`` and an integer upper bound
``z_ub``, every arc whose minimum path reduced cost exceeds
``z_ub - bound - 1`` lies on no solution of value ``z_ub - 1`` or better and
can be deleted. The three strategies differ only in where the dual comes from:

1. the terminal dual of column generation;
2. a deliberately sub-optimal dual that maximizes the reduced costs of the
   paths currently carrying flow, re-solved until nothing more is removed;
3. for single fractional arcs, the dual of the master with that arc forced to
   carry at least one unit.

Only LP-optimal duals cannot delete arcs that carry flow; strategies 2 and 3
exist to get past that.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from .colgen import (
    PRICING_TOL,
    SCALE,
    DualSolution,
    MasterState,
    exact_field,
    price_multi,
    safe_round,
)
from .errors import MasterInfeasible, TimeLimit, UnsafeDual
from .lp import EQ, GE, LE, OPTIMAL, LpModel
from .network import PACKING, Network, SideSystem

STRATEGY3_ARC_SECONDS = 0.5


@dataclass
class FixingReport:
    strategy: str
    removed: list[list[int]] = field(default_factory=list)
    bounds: list[float] = field(default_factory=list)
    basic_removals: int = 0
    wall_time: float = 0.0

    @property
    def total_removed(self) -> int:
        return sum(len(r) for r in self.removed)

    def record(self, removed, bound, basic: bool) -> None:
        self.removed.append(sorted(removed))
        self.bounds.append(float(bound))
        self.basic_removals += int(basic)

    def merge(self, other: "FixingReport") -> None:
        self.removed += other.removed
        self.bounds += other.bounds
        self.basic_removals += other.basic_removals
        self.wall_time += other.wall_time

    def to_json(self) -> dict:
        return {
            "strategy": self.strategy,
            "rounds": len(self.removed),
            "arcs_removed": self.total_removed,
            "removed_per_round": [len(r) for r in self.removed],
            "bounds": self.bounds,
            "basic_removals": self.basic_removals,
            "wall_time": self.wall_time,
        }


def removable_arcs(net: Network, sides: SideSystem, dual: DualSolution, z_ub: int) -> set[int]:
    """Live arcs with minimum reduced cost strictly above ``z_ub - bound - 1``."""
    if not dual.safe:
        raise UnsafeDual("cannot fix arcs with an uncertified dual")
    f = exact_field(net, dual)
    # every quantity below is an integer multiple of 1/SCALE
    limit = (z_ub - 1) * SCALE - sum(b * k for b, k in zip(sides.rhs, dual.scaled))
    out = set()
    for a in net.live_arcs():
        v = f.arc[a]
        if v == math.inf or v > limit:
            out.add(a)
    return out


def fix_by_threshold(net: Network, sides: SideSystem, dual: DualSolution, z_ub: int) -> set[int]:
    """Delete the arcs that cannot appear in a solution better than ``z_ub``."""
    return net.kill(removable_arcs(net, sides, dual, z_ub))


def _apply(state: MasterState, dual: DualSolution, z_ub: int, report: FixingReport) -> tuple[set[int], bool]:
    """One fixing round on the master's network; also reports whether LP flow was cut."""
    removed = fix_by_threshold(state.net, state.sides, dual, z_ub)
    basic = state.sync_dead() if removed else False
    report.record(removed, dual.bound, basic)
    return removed, basic


def _gap_closed(state: MasterState, z_ub: int) -> bool:
    return state.dual is None or not state.dual.safe or state.dual.ceil_bound >= z_ub


def strategy1(state: MasterState, z_ub: int) -> FixingReport:
    """One fixing round with the terminal column generation dual."""
    t0 = time.monotonic()
    report = FixingReport("1")
    if not _gap_closed(state, z_ub):
        _apply(state, state.dual, z_ub, report)
    report.wall_time = time.monotonic() - t0
    return report


def suboptimal_dual(state: MasterState, floor_value: float,
                    deadline: float | None = None) -> list[float] | None:
    """Dual maximizing ``b'beta`` plus the reduced costs of the flow-carrying paths.

    The path constraints of all other paths are separated by shortest-path
    pricing. ``b'beta >= floor_value`` bounds how sub-optimal the result may be.
    Returns ``None`` if the model cannot be solved.
    """
    net, sides = state.net, state.sides
    m = sides.m
    support = [p for p, lam in state.path_solution() if lam > PRICING_TOL]
    lp = LpModel()
    for k in range(m):
        if sides.kinds[k] == PACKING:
            lp.add_column(-float(sides.rhs[k]), {}, -math.inf, 0.0)
        else:
            lp.add_column(-float(sides.rhs[k]), {}, 0.0, math.inf)
    seen: set[tuple[int, ...]] = set()
    for p in support:
        if p.arcs in seen:
            continue
        seen.add(p.arcs)
        th = lp.add_column(-1.0, {}, 0.0, math.inf)
        coefs = {k: float(c) for k, c in p.column}
        coefs[th] = 1.0
        lp.add_row(EQ, float(p.cost), coefs)
    lp.add_row(GE, float(floor_value), {k: float(sides.rhs[k]) for k in range(m)})
    for entry in state.columns:
        if entry[0] == "path" and entry[1].arcs not in seen and all(net.is_live(a) for a in entry[1].arcs):
            seen.add(entry[1].arcs)
            lp.add_row(LE, float(entry[1].cost), {k: float(c) for k, c in entry[1].column})
    while True:
        res = lp.solve()
        if res.status != OPTIMAL:
            return None
        beta = [float(res.x[k]) for k in range(m)]
        fresh = [p for p in price_multi(net, sides, beta, max_columns=state.max_columns)
                 if p.arcs not in seen]
        if not fresh:
            return beta
        for p in fresh:
            seen.add(p.arcs)
            lp.add_row(LE, float(p.cost), {k: float(c) for k, c in p.column})
        if deadline is not None and time.monotonic() > deadline:
            raise TimeLimit("time limit reached in the sub-optimal dual search")


def strategy2(state: MasterState, z_ub: int, deadline: float | None = None) -> FixingReport:
    """Fix with sub-optimal duals until a round removes nothing.

    The master is re-solved whenever a round deletes an arc carrying LP flow,
    which can only raise the bound.
    """
    t0 = time.monotonic()
    report = FixingReport("2")
    while not _gap_closed(state, z_ub):
        floor_value = state.dual.ceil_bound - 1 + 1e-6
        beta = suboptimal_dual(state, floor_value, deadline)
        if beta is None:
            break
        dual = safe_round(state.net, state.sides, beta)
        if not dual.safe:
            break
        removed, basic = _apply(state, dual, z_ub, report)
        if not removed:
            break
        if basic:
            state.solve(deadline)
    report.wall_time = time.monotonic() - t0
    return report


def strategy3(state: MasterState, z_ub: int, arc_budget: int | None = None,
              deadline: float | None = None, arc_seconds: float = STRATEGY3_ARC_SECONDS) -> FixingReport:
    """Per-arc tailored duals for fractional arcs, smallest flow first.

    For an arc with LP flow strictly between 0 and 1, the master is re-solved
    with that arc forced to carry a unit of flow. The duals of the original
    rows remain feasible for the unforced model and usually certify a larger
    reduced cost for the arc. Stops once fewer than ``arc_budget`` arcs
    (default ``50 m``) are live.
    """
    t0 = time.monotonic()
    report = FixingReport("3")
    m = state.sides.m
    if arc_budget is None:
        arc_budget = 50 * m
    flows = state.arc_flows()
    order = sorted((v, a) for a, v in flows.items() if PRICING_TOL < v < 1 - PRICING_TOL)
    for _, a in order:
        if _gap_closed(state, z_ub) or state.net.num_live < arc_budget:
            break
        if deadline is not None and time.monotonic() > deadline:
            break
        if not state.net.is_live(a):
            continue
        trial = state.copy()
        trial.add_cover_row([a])
        stop = time.monotonic() + arc_seconds
        if deadline is not None:
            stop = min(stop, deadline)
        try:
            trial.solve(stop)
        except (MasterInfeasible, TimeLimit):
            continue
        beta = trial.side_duals(trial.result)[:m]
        dual = safe_round(state.net, state.sides, beta)
        if not dual.safe:
            continue
        _, basic = _apply(state, dual, z_ub, report)
        if basic:
            state.solve(deadline)
    report.wall_time = time.monotonic() - t0
    return report


def forced_arc_value(state: MasterState, arc_id: int) -> tuple[float, DualSolution]:
    """LP value with ``arc_id`` forced to one unit, and the certified original-row bound."""
    trial = state.copy()
    trial.add_cover_row([arc_id])
    trial.solve()
    beta = trial.side_duals(trial.result)[: state.sides.m]
    dual = safe_round(state.net, state.sides, beta)
    return trial.objective, dual
