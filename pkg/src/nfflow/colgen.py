"""Column(-and-row) generation for path-flow and arc-flow masters.

Pricing is a shortest path on the acyclic network under arc costs
``c - a'beta``. One forward and one backward topological sweep give, for every
node, the cheapest reduced cost from the source and to the sink; their sum
across an arc is the minimum reduced cost of any path through that arc.
"""

from __future__ import annotations

import csv
import math
import os
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

from .errors import DisconnectedArc, DualInfeasibleInput, MasterInfeasible, TimeLimit
from .lp import EQ, GE, OPTIMAL, LpModel, LpResult
from .network import COVERING, PACKING, Network, Path, SideSystem, decompose_flow, ArcFlowSolution

PRICING_TOL = 1e-9
SCALE = 10**9  # safe rounding grid: multiples of 1e-9
MAX_COLUMNS = 50

PATH_FLOW = "path"
ARC_FLOW = "arc"


@dataclass
class DualSolution:
    beta: tuple
    safe: bool
    bound: Any
    alpha: dict | None = None
    scaled: tuple[int, ...] | None = None
    raw: tuple[float, ...] | None = None

    @property
    def ceil_bound(self):
        if not self.safe:
            return -math.inf
        return math.ceil(self.bound)


@dataclass
class ReducedCostField:
    net: Network
    cplus: list
    cminus: list
    arc: list
    pred: list
    succ: list

    def node_plus(self, v):
        return self.cplus[self.net.index[v]]

    def node_minus(self, v):
        return self.cminus[self.net.index[v]]

    @property
    def min_path(self):
        """Minimum reduced cost over all source-sink paths (``inf`` if none)."""
        val = self.cplus[self.net.index[self.net.sink]]
        return math.inf if val is None else val


def arc_reduced_costs(net: Network, beta: Sequence, scale: int = 1) -> list:
    """Per-arc ``scale*c - a'beta``; ``None`` marks dead arcs."""
    dead = net.dead
    out = []
    for a in net.arcs:
        if a.id in dead:
            out.append(None)
            continue
        r = a.cost * scale
        for k, coef in a.contrib:
            r -= coef * beta[k]
        out.append(r)
    return out


def field_from_arc_costs(net: Network, rc: list) -> ReducedCostField:
    n = len(net.nodes)
    s = net.index[net.source]
    t = net.index[net.sink]
    tails, heads = net.tail_idx, net.head_idx
    cplus: list = [None] * n
    pred: list = [None] * n
    cplus[s] = 0
    for i in net._topo_idx:
        if i == s:
            continue
        best = None
        bp = None
        for a in net.in_arcs[i]:
            r = rc[a]
            if r is None:
                continue
            cu = cplus[tails[a]]
            if cu is None:
                continue
            val = cu + r
            if best is None or val < best:
                best = val
                bp = a
        cplus[i] = best
        pred[i] = bp
    cminus: list = [None] * n
    succ: list = [None] * n
    cminus[t] = 0
    for i in reversed(net._topo_idx):
        if i == t:
            continue
        best = None
        bs = None
        for a in net.out_arcs[i]:
            r = rc[a]
            if r is None:
                continue
            cv = cminus[heads[a]]
            if cv is None:
                continue
            val = cv + r
            if best is None or val < best:
                best = val
                bs = a
        cminus[i] = best
        succ[i] = bs
    arc = []
    for a, r in enumerate(rc):
        if r is None:
            arc.append(math.inf)
            continue
        cu = cplus[tails[a]]
        cv = cminus[heads[a]]
        arc.append(math.inf if cu is None or cv is None else cu + r + cv)
    return ReducedCostField(net, cplus, cminus, arc, pred, succ)


def reduced_cost_field(net: Network, sides: SideSystem, beta: Sequence) -> ReducedCostField:
    """Minimum reduced cost from the source, to the sink and through every arc."""
    if len(beta) < sides.m:
        raise ValueError("beta shorter than the number of side rows")
    return field_from_arc_costs(net, arc_reduced_costs(net, beta))


def extract_min_path(field: ReducedCostField, arc_id: int) -> Path:
    """A path of minimum reduced cost through ``arc_id`` (smallest-id ties)."""
    net = field.net
    if not math.isfinite(field.arc[arc_id]):
        raise DisconnectedArc(f"arc {arc_id} lies on no live source-sink path")
    chain = []
    u = net.tail_idx[arc_id]
    s = net.index[net.source]
    while u != s:
        a = field.pred[u]
        chain.append(a)
        u = net.tail_idx[a]
    chain.reverse()
    chain.append(arc_id)
    v = net.head_idx[arc_id]
    t = net.index[net.sink]
    while v != t:
        a = field.succ[v]
        chain.append(a)
        v = net.head_idx[a]
    return Path.from_arcs(net, chain)


def shortest_path(field: ReducedCostField) -> Path | None:
    net = field.net
    t = net.index[net.sink]
    if field.cplus[t] is None:
        return None
    chain = []
    v = t
    s = net.index[net.source]
    while v != s:
        a = field.pred[v]
        chain.append(a)
        v = net.tail_idx[a]
    chain.reverse()
    return Path.from_arcs(net, chain)


def price_multi(net: Network, sides: SideSystem, beta: Sequence, tol: float = PRICING_TOL,
                max_columns: int | None = MAX_COLUMNS, field: ReducedCostField | None = None) -> list[Path]:
    """Negative reduced cost paths: for every side row, the cheapest path covering it.

    The global shortest path is always considered too, so the result is empty
    exactly when no path has reduced cost below ``-tol``.
    """
    if field is None:
        field = reduced_cost_field(net, sides, beta)
    if not field.min_path < -tol:
        return []
    rows = net.rows_index()
    arcval = field.arc
    found: dict[tuple[int, ...], Path] = {}
    p = shortest_path(field)
    found[p.arcs] = p
    for k in range(sides.m):
        best = None
        bid = None
        for a in rows.get(k, ()):
            v = arcval[a]
            if best is None or v < best:
                best, bid = v, a
        if bid is None or not best < -tol:
            continue
        p = extract_min_path(field, bid)
        found.setdefault(p.arcs, p)
    scored = [(p.reduced_cost(beta), p.arcs, p) for p in found.values()]
    scored = [s for s in scored if s[0] < -tol]
    scored.sort(key=lambda s: (s[0], s[1]))
    if max_columns is not None:
        scored = scored[:max_columns]
    return [s[2] for s in scored]


def alpha_from_beta(net: Network, sides: SideSystem, beta: Sequence, tol: float = PRICING_TOL) -> dict:
    """Node potentials completing ``beta`` to a feasible arc-flow dual.

    ``alpha`` is the shortest-path cost from the source under ``c - a'beta``.
    Nodes the source cannot reach get a potential high enough that their arcs
    never bind.
    """
    exact = all(isinstance(b, (int, Fraction)) for b in beta)
    rc = arc_reduced_costs(net, beta)
    f = field_from_arc_costs(net, rc)
    lo = f.min_path
    if lo < (0 if exact else -tol):
        raise DualInfeasibleInput(f"minimum path reduced cost {lo} is negative")
    spread = sum(abs(r) for r in rc if r is not None)
    high = 3 * spread + 1
    alpha: dict = {}
    s = net.index[net.source]
    for i in net._topo_idx:
        v = net.nodes[i]
        if i == s:
            alpha[v] = 0
            continue
        best = None
        for a in net.in_arcs[i]:
            r = rc[a]
            if r is None:
                continue
            val = alpha[net.nodes[net.tail_idx[a]]] + r
            if best is None or val < best:
                best = val
        alpha[v] = high if best is None else best
    return alpha


def _scaled_rounding(sides: SideSystem, beta_raw: Sequence[float]) -> list[int]:
    out = []
    for k in range(sides.m):
        b = max(0.0, float(beta_raw[k])) if not isinstance(beta_raw[k], Fraction) else max(Fraction(0), beta_raw[k])
        v = Fraction(b) * SCALE
        if sides.kinds[k] == PACKING:
            out.append(math.ceil(v))
        else:  # covering, and mixed rows treated as covering
            out.append(math.floor(v))
    return out


def exact_min_path(net: Network, scaled: Sequence[int]) -> int | None:
    """Exact minimum path reduced cost on the ``1e-9`` grid (scaled by ``SCALE``)."""
    f = field_from_arc_costs(net, arc_reduced_costs(net, scaled, SCALE))
    return f.cplus[net.index[net.sink]]


def safe_round(net: Network, sides: SideSystem, beta_raw: Sequence[float]) -> DualSolution:
    """Round duals onto the ``1e-9`` grid and verify feasibility exactly.

    Covering (and mixed) rows are rounded down, packing rows up. The rounded
    vector is certified by an integer shortest-path computation; if some path
    still has negative reduced cost the result is flagged unsafe with bound
    ``-inf``.
    """
    scaled = _scaled_rounding(sides, beta_raw)
    beta = tuple(Fraction(k, SCALE) for k in scaled)
    lo = exact_min_path(net, scaled)
    raw = tuple(float(b) for b in beta_raw[: sides.m])
    if lo is not None and lo < 0:
        return DualSolution(beta, False, -math.inf, None, tuple(scaled), raw)
    bound = Fraction(sum(b * k for b, k in zip(sides.rhs, scaled)), SCALE)
    return DualSolution(beta, True, bound, None, tuple(scaled), raw)


def exact_field(net: Network, dual: DualSolution) -> ReducedCostField:
    """Reduced cost field of a rounded dual, in integers scaled by ``SCALE``."""
    return field_from_arc_costs(net, arc_reduced_costs(net, dual.scaled, SCALE))


def trivial_upper_bound(net: Network, sides: SideSystem) -> int:
    """A crude objective bound: covering rows times the costliest path."""
    n = len(net.nodes)
    longest: list = [None] * n
    longest[net.index[net.source]] = 0
    for i in net._topo_idx:
        for a in net.in_arcs[i]:
            if a in net.dead:
                continue
            lu = longest[net.tail_idx[a]]
            if lu is None:
                continue
            val = lu + net.arcs[a].cost
            if longest[i] is None or val > longest[i]:
                longest[i] = val
    top = longest[net.index[net.sink]] or 0
    return max(1, sum(max(b, 0) for b in sides.rhs)) * max(1, top)


class _IterLog:
    def __init__(self, target):
        self._own = None
        if target is None:
            path = os.environ.get("NFFLOW_LOG")
            if path:
                new = not os.path.exists(path)
                self._own = open(path, "a", newline="")
                target = self._own
                if new:
                    csv.writer(target).writerow(["iteration", "objective", "columns_added", "min_reduced_cost"])
        self.target = target

    def write(self, *row):
        if self.target is not None:
            csv.writer(self.target).writerow(row)

    def close(self):
        if self._own is not None:
            self._own.close()


class MasterState:
    """Restricted master problem over a network, with its LP and column pool.

    In path-flow mode every column is a path. In arc-flow mode columns are arcs
    plus the total-flow variable, and a conservation row for a node is created
    the first time a pooled arc touches it. Artificial columns (one per side
    row, cost ``big_m``) keep every restricted master feasible.
    """

    def __init__(self, net: Network, sides: SideSystem, mode: str = PATH_FLOW,
                 pool: Sequence[Path] = (), big_m: float | None = None,
                 max_columns: int | None = MAX_COLUMNS, log=None):
        if mode not in (PATH_FLOW, ARC_FLOW):
            raise ValueError(f"unknown mode {mode!r}")
        self.net = net
        self.sides = sides
        self.mode = mode
        self.max_columns = max_columns
        self.big_m = float(big_m if big_m is not None else 10 * trivial_upper_bound(net, sides))
        self.lp = LpModel()
        self.side_rows: list[int] = []
        self.columns: list[tuple] = []
        self.path_col: dict[tuple[int, ...], int] = {}
        self.arc_col: dict[int, int] = {}
        self.node_row: dict[Any, int] = {}
        self.z_col: int | None = None
        self.dual: DualSolution | None = None
        self.result: LpResult | None = None
        self.iterations = 0
        self.history: list[tuple] = []
        self._log = log
        for k in range(sides.m):
            self.side_rows.append(self.lp.add_row(GE, sides.rhs[k]))
        for k in range(sides.m):
            self._add_col(("art", k), self.big_m, {self.side_rows[k]: 1.0})
        if mode == ARC_FLOW:
            self.z_col = self._add_col(("z",), 0.0, {})
        for p in pool:
            if all(net.is_live(a) for a in p.arcs):
                self.add_path(p)

    # -- pool management --------------------------------------------------------

    def _add_col(self, entry, obj, coefs, ub=math.inf):
        j = self.lp.add_column(obj, coefs, 0.0, ub)
        self.columns.append(entry)
        return j

    def _node_row(self, v):
        r = self.node_row.get(v)
        if r is None:
            coefs = {}
            if v == self.net.source:
                coefs[self.z_col] = 1.0
            elif v == self.net.sink:
                coefs[self.z_col] = -1.0
            r = self.lp.add_row(EQ, 0.0, coefs)
            self.node_row[v] = r
        return r

    def add_arc(self, arc_id: int) -> int | None:
        if arc_id in self.arc_col:
            return None
        a = self.net.arcs[arc_id]
        rt = self._node_row(a.tail)
        rh = self._node_row(a.head)
        coefs = {self.side_rows[k]: float(c) for k, c in a.contrib}
        coefs[rt] = coefs.get(rt, 0.0) - 1.0
        coefs[rh] = coefs.get(rh, 0.0) + 1.0
        j = self._add_col(("arc", arc_id), float(a.cost), coefs)
        self.arc_col[arc_id] = j
        return j

    def add_path(self, path: Path) -> int:
        """Add a path (path mode) or its missing arcs (arc mode); returns #columns added."""
        if self.mode == PATH_FLOW:
            if path.arcs in self.path_col:
                return 0
            coefs = {self.side_rows[k]: float(c) for k, c in path.column}
            self.path_col[path.arcs] = self._add_col(("path", path), float(path.cost), coefs)
            return 1
        return sum(1 for a in path.arcs if self.add_arc(a) is not None)

    def add_cover_row(self, arc_ids, rhs: int = 1) -> int:
        """Append the side row ``sum(phi_a for a in arc_ids) >= rhs``."""
        arc_ids = set(arc_ids)
        k = self.sides.m
        self.net = self.net.with_row(k, arc_ids)
        self.sides = self.sides.extended(rhs, COVERING)
        coefs = {}
        for j, entry in enumerate(self.columns):
            if entry[0] == "path":
                c = sum(1 for a in entry[1].arcs if a in arc_ids)
                if c:
                    coefs[j] = float(c)
            elif entry[0] == "arc" and entry[1] in arc_ids:
                coefs[j] = 1.0
        row = self.lp.add_row(GE, rhs, coefs)
        self.side_rows.append(row)
        # re-key pooled paths so their columns carry the new coefficient
        if self.mode == PATH_FLOW:
            for j, entry in enumerate(self.columns):
                if entry[0] == "path":
                    self.columns[j] = ("path", Path.from_arcs(self.net, entry[1].arcs))
        self._add_col(("art", k), self.big_m, {row: 1.0})
        self.dual = None
        return k

    def sync_dead(self) -> bool:
        """Fix pool columns using dead arcs at zero; True if any had positive value."""
        dead = self.net.dead
        x = self.result.x if self.result is not None else None
        hit = False
        for j, entry in enumerate(self.columns):
            if self.lp.ub[j] == 0.0:
                continue
            if entry[0] == "path":
                gone = any(a in dead for a in entry[1].arcs)
            elif entry[0] == "arc":
                gone = entry[1] in dead
            else:
                gone = False
            if gone:
                self.lp.set_bounds(j, ub=0.0)
                if x is not None and j < len(x) and x[j] > PRICING_TOL:
                    hit = True
        return hit

    def copy(self) -> "MasterState":
        other = object.__new__(MasterState)
        other.__dict__.update(self.__dict__)
        other.net = self.net.copy()
        other.lp = self.lp.copy()
        other.side_rows = list(self.side_rows)
        other.columns = list(self.columns)
        other.path_col = dict(self.path_col)
        other.arc_col = dict(self.arc_col)
        other.node_row = dict(self.node_row)
        other.history = list(self.history)
        return other

    # -- solving ------------------------------------------------------------------

    def side_duals(self, res: LpResult) -> list[float]:
        return [max(0.0, float(res.duals[r])) for r in self.side_rows]

    def solve(self, deadline: float | None = None) -> "MasterState":
        """Run column generation to LP optimality, then certify the final dual."""
        log = _IterLog(self._log)
        try:
            while True:
                res = self.lp.solve()
                if res.status != OPTIMAL:
                    raise MasterInfeasible(f"restricted master returned {res.status}")
                beta = self.side_duals(res)
                field = reduced_cost_field(self.net, self.sides, beta)
                paths = price_multi(self.net, self.sides, beta, max_columns=self.max_columns, field=field)
                added = sum(self.add_path(p) for p in paths)
                self.iterations += 1
                lo = field.min_path
                self.history.append((self.iterations, res.objective, added, lo))
                log.write(self.iterations, repr(res.objective), added, repr(lo))
                if not paths or added == 0:
                    break
                if deadline is not None and time.monotonic() > deadline:
                    self.result = res
                    raise TimeLimit("time limit reached during column generation")
        finally:
            log.close()
        self.result = res
        art = sum(res.x[j] for j, e in enumerate(self.columns) if e[0] == "art")
        if art > 1e-7:
            self.dual = DualSolution(tuple(beta), False, -math.inf, raw=tuple(beta))
            raise MasterInfeasible(f"artificial columns carry {art:.3g} at termination")
        self.dual = safe_round(self.net, self.sides, beta)
        return self

    @property
    def objective(self) -> float:
        return self.result.objective

    @property
    def bound(self):
        return self.dual.bound if self.dual is not None else -math.inf

    def arc_flows(self) -> dict[int, float]:
        """Current LP solution aggregated onto arcs (zero entries omitted)."""
        x = self.result.x
        flow: dict[int, float] = {}
        for j, entry in enumerate(self.columns):
            v = float(x[j])
            if v <= PRICING_TOL:
                continue
            if entry[0] == "path":
                for a in entry[1].arcs:
                    flow[a] = flow.get(a, 0.0) + v
            elif entry[0] == "arc":
                flow[entry[1]] = flow.get(entry[1], 0.0) + v
        return flow

    def path_solution(self) -> list[tuple[Path, float]]:
        """Current LP solution as paths with positive multiplicity."""
        x = self.result.x
        if self.mode == PATH_FLOW:
            return [(e[1], float(x[j])) for j, e in enumerate(self.columns)
                    if e[0] == "path" and x[j] > PRICING_TOL]
        flow = self.arc_flows()
        total = float(x[self.z_col])
        return decompose_flow(self.net, ArcFlowSolution(flow, total), tol=1e-7)

    def basic_arcs(self) -> set[int]:
        return set(self.arc_flows())


def solve_master(net: Network, sides: SideSystem, mode: str = PATH_FLOW,
                 pool: Sequence[Path] = (), deadline: float | None = None, **kw) -> MasterState:
    """Build a restricted master on ``net`` (owned by the result) and solve it."""
    return MasterState(net, sides, mode, pool, **kw).solve(deadline)
