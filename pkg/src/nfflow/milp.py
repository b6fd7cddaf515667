"""Integer arc-flow models: a small branch-and-bound and an MPS writer.

The model has one integer variable per live arc and a total-flow variable
``z``; every node carries a conservation row (``z`` units leave the source and
reach the sink), side rows and extra covering rows are ``>=`` rows.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ConservationViolated
from .lp import EQ, GE, OPTIMAL, LpModel
from .network import ArcFlowSolution, Network, SideSystem, decompose_flow

INT_TOL = 1e-6

OPTIMAL_STATUS = "Optimal"
INFEASIBLE_STATUS = "Infeasible"
CUTOFF_STATUS = "CutoffNoBetter"
TIME_LIMIT_STATUS = "TimeLimit"

ExtraRow = tuple[Sequence[int], int]  # (arc ids, rhs) of a covering row


@dataclass
class MilpResult:
    status: str
    solution: ArcFlowSolution | None = None
    value: int | None = None
    bound: float = -math.inf
    nodes: int = 0

    @property
    def found(self) -> bool:
        return self.solution is not None


@dataclass
class ArcFlowModel:
    lp: LpModel
    arc_col: dict[int, int]
    z_col: int
    side_rows: list[int]
    extra_rows: list[int]
    row_defs: list[tuple[dict[int, int], float, bool]] = field(default_factory=list)


def build_arc_flow_model(net: Network, sides: SideSystem, extra_rows: Sequence[ExtraRow] = ()) -> ArcFlowModel:
    """LP relaxation of the arc-flow model over the live arcs."""
    lp = LpModel()
    node_rows = [lp.add_row(EQ, 0.0) for _ in net.nodes]
    side_rows = [lp.add_row(GE, float(sides.rhs[k])) for k in range(sides.m)]
    extra = [lp.add_row(GE, float(rhs)) for _, rhs in extra_rows]
    member: dict[int, list[int]] = {}
    for j, (ids, _) in enumerate(extra_rows):
        for a in ids:
            member.setdefault(a, []).append(j)
    arc_col = {}
    for a in net.live_arcs():
        arc = net.arcs[a]
        coefs = {node_rows[net.tail_idx[a]]: -1.0}
        h = node_rows[net.head_idx[a]]
        coefs[h] = coefs.get(h, 0.0) + 1.0
        for k, c in arc.contrib:
            coefs[side_rows[k]] = float(c)
        for j in member.get(a, ()):
            coefs[extra[j]] = coefs.get(extra[j], 0.0) + 1.0
        arc_col[a] = lp.add_column(float(arc.cost), coefs)
    s, t = node_rows[net.index[net.source]], node_rows[net.index[net.sink]]
    z = lp.add_column(0.0, {s: 1.0, t: -1.0})
    # side and extra rows in integer form, for feasibility checks of rounded flows
    defs = []
    for k in range(sides.m):
        defs.append(({a: c for a in arc_col for r, c in net.arcs[a].contrib if r == k}, sides.rhs[k], True))
    for ids, rhs in extra_rows:
        row: dict[int, int] = {}
        for a in ids:
            if a in arc_col:
                row[a] = row.get(a, 0) + 1
        defs.append((row, rhs, True))
    return ArcFlowModel(lp, arc_col, z, side_rows, extra, defs)


def _feasible(model: ArcFlowModel, flow: dict[int, int]) -> bool:
    for row, rhs, _ in model.row_defs:
        if sum(c * flow.get(a, 0) for a, c in row.items()) < rhs:
            return False
    return True


def _round_heuristic(net: Network, model: ArcFlowModel, x) -> tuple[int, dict[int, int]] | None:
    """Round a fractional flow: keep the integer part of every path, then add
    whole copies of fractional paths (largest fraction first) until feasible."""
    flow = {a: float(x[j]) for a, j in model.arc_col.items() if x[j] > INT_TOL}
    try:
        paths = decompose_flow(net, ArcFlowSolution(flow, float(x[model.z_col])), tol=1e-7)
    except ConservationViolated:
        return None
    counts = [(p, math.floor(v + INT_TOL)) for p, v in paths]
    sol: dict[int, int] = {}
    for p, k in counts:
        for a in p.arcs:
            if k:
                sol[a] = sol.get(a, 0) + k
    extra = sorted(((v - math.floor(v + INT_TOL), p) for p, v in paths), key=lambda t: (-t[0], t[1].arcs))
    for frac, p in extra:
        if _feasible(model, sol):
            break
        if frac <= INT_TOL:
            continue
        for a in p.arcs:
            sol[a] = sol.get(a, 0) + 1
    if not _feasible(model, sol):
        return None
    value = sum(net.arcs[a].cost * v for a, v in sol.items())
    return value, {a: v for a, v in sol.items() if v}


def _ceil(v: float) -> float:
    return math.ceil(v - INT_TOL) if math.isfinite(v) else v


def bb_solve(net: Network, sides: SideSystem, extra_rows: Sequence[ExtraRow] = (),
             cutoff: float = math.inf, time_limit: float | None = None,
             deadline: float | None = None) -> MilpResult:
    """Best integer arc flow of value at most ``cutoff``.

    Depth-first branch-and-bound on single arc flows (fractional part closest
    to one half, smallest id on ties), with a rounding heuristic at each node.
    Objective values are assumed integral, so after an incumbent of value ``v``
    only solutions of value ``v - 1`` or less are searched.
    """
    if time_limit is not None:
        end = time.monotonic() + time_limit
        deadline = end if deadline is None else min(deadline, end)
    model = build_arc_flow_model(net, sides, extra_rows)
    lp = model.lp
    base_lb, base_ub = list(lp.lb), list(lp.ub)
    limit = cutoff
    best: tuple[int, dict[int, int]] | None = None
    heap: list = []
    seq = 0
    heapq.heappush(heap, (0, -math.inf, seq, {}, None))
    applied: dict[int, tuple[float, float]] = {}
    nodes = 0
    root_infeasible = False
    open_bound = math.inf
    by_arc = sorted(model.arc_col.items())

    while heap:
        if deadline is not None and time.monotonic() > deadline:
            open_bound = min(b for _, b, *_ in heap)
            break
        neg_depth, lb, _, bounds, basis = heapq.heappop(heap)
        if _ceil(lb) > limit:
            continue
        for j in applied:
            if j not in bounds:
                lp.set_bounds(j, base_lb[j], base_ub[j])
        for j, (lo, hi) in bounds.items():
            lp.set_bounds(j, lo, hi)
        applied = bounds
        if basis is not None:
            lp.set_basis(basis)
        res = lp.solve()
        nodes += 1
        if res.status != OPTIMAL:
            if nodes == 1:
                root_infeasible = True
            continue
        val = res.objective
        if _ceil(val) > limit:
            continue
        x = res.x
        frac = None
        for _, j in by_arc:
            f = x[j] - math.floor(x[j])
            if INT_TOL < f < 1 - INT_TOL:
                score = abs(f - 0.5)
                if frac is None or score < frac[0]:
                    frac = (score, j)
        if frac is None:
            sol = {a: int(round(x[j])) for a, j in model.arc_col.items() if round(x[j]) > 0}
            value = sum(net.arcs[a].cost * v for a, v in sol.items())
            if value <= limit and (best is None or value < best[0]):
                best = (value, sol)
                limit = value - 1
            continue
        rounded = _round_heuristic(net, model, x)
        if rounded is not None and rounded[0] <= limit and (best is None or rounded[0] < best[0]):
            best = rounded
            limit = rounded[0] - 1
            if _ceil(val) > limit:
                continue
        j = frac[1]
        v = x[j]
        lo, hi = bounds.get(j, (base_lb[j], base_ub[j]))
        snap = lp.get_basis()
        up = dict(bounds)
        up[j] = (math.ceil(v), hi)
        down = dict(bounds)
        down[j] = (lo, math.floor(v))
        for child in (up, down):
            seq += 1
            heapq.heappush(heap, (neg_depth - 1, val, seq, child, snap))

    for j in applied:
        lp.set_bounds(j, base_lb[j], base_ub[j])
    timed_out = bool(heap) and deadline is not None and time.monotonic() > deadline
    if best is not None:
        value, sol = best
        total = sum(v for a, v in sol.items() if net.arcs[a].tail == net.source)
        result = MilpResult(OPTIMAL_STATUS, ArcFlowSolution(sol, total), value, value, nodes)
        if timed_out:
            result.status = TIME_LIMIT_STATUS
            result.bound = min(value, _ceil(open_bound))
        return result
    if timed_out:
        return MilpResult(TIME_LIMIT_STATUS, None, None, _ceil(open_bound), nodes)
    if root_infeasible or cutoff == math.inf:
        return MilpResult(INFEASIBLE_STATUS, None, None, math.inf, nodes)
    return MilpResult(CUTOFF_STATUS, None, None, cutoff + 1, nodes)


# -- MPS export -------------------------------------------------------------------


def _num(v: float) -> str:
    return f"{v:.12g}"


def export_mps(net: Network, sides: SideSystem, extra_rows: Sequence[ExtraRow] = (),
               name: str = "NFFLOW") -> str:
    """Fixed-format MPS of the integer arc-flow model over the live arcs."""
    model = build_arc_flow_model(net, sides, extra_rows)
    lp = model.lp
    row_names = [f"V{i}" for i in range(len(net.nodes))]
    row_names += [f"S{k}" for k in range(sides.m)]
    row_names += [f"X{j}" for j in range(len(extra_rows))]
    lines = [f"NAME          {name}", "ROWS", " N  COST"]
    for r, nm in enumerate(row_names):
        lines.append(f" {'E' if lp.senses[r] == EQ else 'G'}  {nm}")
    lines.append("COLUMNS")
    lines.append("    MARKER                 'MARKER'                 'INTORG'")

    def column(cname, j, cost):
        entries = []
        if cost:
            entries.append(("COST", cost))
        for r in sorted(lp.cols[j]):
            entries.append((row_names[r], lp.cols[j][r]))
        for rn, v in entries:
            lines.append(f"    {cname:<8}  {rn:<8}  {_num(v):>12}")

    for a, j in sorted(model.arc_col.items()):
        column(f"A{a}", j, lp.obj[j])
    lines.append("    MARKER                 'MARKER'                 'INTEND'")
    column("Z", model.z_col, 0.0)
    lines.append("RHS")
    for r, nm in enumerate(row_names):
        if lp.rhs[r]:
            lines.append(f"    {'RHS':<8}  {nm:<8}  {_num(lp.rhs[r]):>12}")
    lines.append("BOUNDS")
    for a in sorted(model.arc_col):
        lines.append(f" PL {'BND':<8}  A{a}")
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def mps_counts(text: str) -> tuple[int, int]:
    """(constraint rows, columns) declared in an MPS text, objective row excluded."""
    section = None
    rows = 0
    cols: set[str] = set()
    for line in text.splitlines():
        if not line.startswith(" "):
            section = line.split()[0]
            continue
        parts = line.split()
        if section == "ROWS" and parts[0] != "N":
            rows += 1
        elif section == "COLUMNS" and parts[0] != "MARKER":
            cols.add(parts[0])
    return rows, len(cols)
