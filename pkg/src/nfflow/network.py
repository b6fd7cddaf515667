"""Acyclic decision networks, side-constraint rows, paths and flow decomposition.

A :class:`Network` is a directed acyclic multigraph with a distinguished
source and sink. Every arc carries an integer cost and a sparse integer
contribution vector over the side rows described by a :class:`SideSystem`.
Arcs are removed logically (the ``dead`` set), so arc ids stay stable for the
whole lifetime of a solve.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Any, Hashable, Iterable, Mapping, Sequence

from .errors import ConservationViolated

COVERING = "covering"
PACKING = "packing"
MIXED = "mixed"

FLOW_TOL = 1e-9


@dataclass(frozen=True)
class Arc:
    id: int
    tail: Hashable
    head: Hashable
    cost: int
    contrib: tuple[tuple[int, int], ...] = ()
    group: Any = None

    def coef(self, row: int) -> int:
        for k, a in self.contrib:
            if k == row:
                return a
        return 0


def make_contrib(mapping: Mapping[int, int]) -> tuple[tuple[int, int], ...]:
    """Normalise a ``row -> coefficient`` mapping into the arc storage format."""
    return tuple(sorted((int(k), int(a)) for k, a in mapping.items() if a != 0))


class Network:
    """Acyclic network over hashable node ids.

    ``arcs[i].id`` must equal ``i``. The topological order is computed with
    Kahn's algorithm (ties broken by node insertion order) unless given.
    ``topo`` is ``None`` when the graph contains a cycle; use
    :func:`validate_network` to get a readable diagnosis.
    """

    def __init__(
        self,
        nodes: Iterable[Hashable],
        arcs: Iterable[Arc],
        source: Hashable,
        sink: Hashable,
        dead: Iterable[int] = (),
        topo: Sequence[Hashable] | None = None,
    ):
        self.nodes = tuple(nodes)
        self.arcs = tuple(arcs)
        self.source = source
        self.sink = sink
        self.dead: set[int] = set(dead)
        self.index = {v: i for i, v in enumerate(self.nodes)}
        n = len(self.nodes)
        self.out_arcs: list[list[int]] = [[] for _ in range(n)]
        self.in_arcs: list[list[int]] = [[] for _ in range(n)]
        self._dangling = []
        self.tail_idx: list[int] = []
        self.head_idx: list[int] = []
        for a in self.arcs:
            t = self.index.get(a.tail)
            h = self.index.get(a.head)
            self.tail_idx.append(-1 if t is None else t)
            self.head_idx.append(-1 if h is None else h)
            if t is None or h is None:
                self._dangling.append(a.id)
                continue
            self.out_arcs[t].append(a.id)
            self.in_arcs[h].append(a.id)
        for lst in self.out_arcs:
            lst.sort()
        for lst in self.in_arcs:
            lst.sort()
        if topo is None:
            topo = self._toposort()
        self.topo = None if topo is None else tuple(topo)
        self._topo_idx = None if self.topo is None else [self.index[v] for v in self.topo]
        self._rows_cache = None

    def _toposort(self):
        n = len(self.nodes)
        indeg = [0] * n
        for i in range(n):
            for a in self.out_arcs[i]:
                indeg[self.index[self.arcs[a].head]] += 1
        heap = [i for i in range(n) if indeg[i] == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            i = heapq.heappop(heap)
            order.append(self.nodes[i])
            for a in self.out_arcs[i]:
                j = self.index[self.arcs[a].head]
                indeg[j] -= 1
                if indeg[j] == 0:
                    heapq.heappush(heap, j)
        if len(order) != n:
            return None
        return order

    # -- liveness -------------------------------------------------------------

    def is_live(self, arc_id: int) -> bool:
        return arc_id not in self.dead

    def live_arcs(self) -> list[int]:
        return [a.id for a in self.arcs if a.id not in self.dead]

    @property
    def num_live(self) -> int:
        return len(self.arcs) - len(self.dead)

    def kill(self, arc_ids: Iterable[int]) -> set[int]:
        """Mark arcs dead; returns the ids that were live before the call."""
        newly = {a for a in arc_ids if a not in self.dead}
        self.dead |= newly
        return newly

    def copy(self) -> "Network":
        """Shallow copy sharing the immutable arc data, with its own dead set."""
        other = object.__new__(Network)
        other.__dict__.update(self.__dict__)
        other.dead = set(self.dead)
        return other

    def rows_index(self) -> dict[int, list[int]]:
        """Map each side row to the ids of arcs with a nonzero coefficient on it."""
        if self._rows_cache is None:
            rows: dict[int, list[int]] = {}
            for a in self.arcs:
                for k, _ in a.contrib:
                    rows.setdefault(k, []).append(a.id)
            self._rows_cache = rows
        return self._rows_cache

    def with_row(self, row: int, arc_ids: Iterable[int], coef: int = 1) -> "Network":
        """Copy of the network with ``coef`` added on ``row`` for the given arcs."""
        chosen = set(arc_ids)
        arcs = []
        for a in self.arcs:
            if a.id in chosen:
                d = dict(a.contrib)
                d[row] = d.get(row, 0) + coef
                a = Arc(a.id, a.tail, a.head, a.cost, make_contrib(d), a.group)
            arcs.append(a)
        return Network(self.nodes, arcs, self.source, self.sink, self.dead, self.topo)

    def node_pos(self, v) -> int:
        return self.index[v]

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return (
            self.nodes == other.nodes
            and self.arcs == other.arcs
            and self.source == other.source
            and self.sink == other.sink
            and self.topo == other.topo
            and self.dead == other.dead
        )

    def __repr__(self):
        return (
            f"Network(|V|={len(self.nodes)}, |A|={len(self.arcs)}, "
            f"live={self.num_live}, source={self.source!r}, sink={self.sink!r})"
        )

    def dump(self) -> str:
        """Line-oriented text dump of the live arcs, used by golden tests."""
        lines = []
        for a in self.arcs:
            if a.id in self.dead:
                continue
            contrib = ",".join(f"{k}:{c}" for k, c in a.contrib)
            lines.append(
                f"arc {a.id} {_fmt_node(a.tail)} {_fmt_node(a.head)} {a.cost} {{{contrib}}}"
            )
        return "\n".join(lines) + ("\n" if lines else "")


def _fmt_node(v) -> str:
    if isinstance(v, tuple):
        return "(" + ",".join(_fmt_node(x) for x in v) + ")"
    return str(v)


def classify_row(net: Network, row: int) -> str:
    coefs = [a.coef(row) for a in net.arcs]
    if all(c >= 0 for c in coefs):
        return COVERING
    if all(c <= 0 for c in coefs):
        return PACKING
    return MIXED


@dataclass(frozen=True)
class SideSystem:
    """The ``m`` side rows, all in ``>=`` sense: ``sum_a contrib_a * phi_a >= rhs``."""

    rhs: tuple[int, ...]
    kinds: tuple[str, ...]

    @property
    def m(self) -> int:
        return len(self.rhs)

    @classmethod
    def from_network(cls, net: Network, rhs: Sequence[int]) -> "SideSystem":
        rhs = tuple(int(b) for b in rhs)
        kinds = tuple(classify_row(net, k) for k in range(len(rhs)))
        return cls(rhs, kinds)

    def extended(self, rhs: int, kind: str = COVERING) -> "SideSystem":
        return SideSystem(self.rhs + (int(rhs),), self.kinds + (kind,))


@dataclass(frozen=True)
class Path:
    arcs: tuple[int, ...]
    cost: int
    column: tuple[tuple[int, int], ...]

    @classmethod
    def from_arcs(cls, net: Network, arc_ids: Sequence[int]) -> "Path":
        arc_ids = tuple(arc_ids)
        if not arc_ids:
            raise ValueError("a path needs at least one arc")
        cost = 0
        col: dict[int, int] = {}
        prev = net.source
        for aid in arc_ids:
            a = net.arcs[aid]
            if a.tail != prev:
                raise ValueError(f"arc {aid} does not continue the path at node {prev!r}")
            cost += a.cost
            for k, c in a.contrib:
                col[k] = col.get(k, 0) + c
            prev = a.head
        if prev != net.sink:
            raise ValueError("path does not end at the sink")
        return cls(arc_ids, cost, make_contrib(col))

    def coef(self, row: int) -> int:
        for k, a in self.column:
            if k == row:
                return a
        return 0

    def reduced_cost(self, beta: Sequence) -> Any:
        return self.cost - sum(a * beta[k] for k, a in self.column)


@dataclass
class ArcFlowSolution:
    flow: dict[int, Any]
    total: Any = 0

    @classmethod
    def from_paths(cls, paths: Iterable[tuple[Path, Any]]) -> "ArcFlowSolution":
        flow: dict[int, Any] = {}
        total = 0
        for p, mult in paths:
            total += mult
            for a in p.arcs:
                flow[a] = flow.get(a, 0) + mult
        return cls(flow, total)

    def objective(self, net: Network):
        return sum(net.arcs[a].cost * v for a, v in self.flow.items())


# -- validation -----------------------------------------------------------------


def validate_network(net: Network, sides: SideSystem | None = None) -> list[str]:
    """Return human-readable invariant violations; empty means valid."""
    diags = []
    for i, a in enumerate(net.arcs):
        if a.id != i:
            diags.append(f"arc at position {i} has id {a.id}")
    for aid in net._dangling:
        a = net.arcs[aid]
        diags.append(f"arc {aid} is dangling ({a.tail!r}->{a.head!r} not both in V)")
    if net.source not in net.index:
        diags.append("source not in V")
    if net.sink not in net.index:
        diags.append("sink not in V")
    for a in net.arcs:
        if a.head == net.source:
            diags.append(f"arc {a.id} enters source")
        if a.tail == net.sink:
            diags.append(f"arc {a.id} leaves sink")
        if not isinstance(a.cost, int):
            diags.append(f"arc {a.id} has non-integer cost")
        for k, c in a.contrib:
            if not isinstance(c, int):
                diags.append(f"arc {a.id} has non-integer coefficient on row {k}")
            if sides is not None and not 0 <= k < sides.m:
                diags.append(f"arc {a.id} references unknown row {k}")
    if net.topo is None:
        diags.append("cycle detected")
    if sides is not None:
        if len(sides.kinds) != sides.m:
            diags.append("row kinds and rhs lengths differ")
        for k, kind in enumerate(sides.kinds):
            actual = classify_row(net, k)
            if actual != kind:
                diags.append(f"row {k} classified {kind} but coefficients make it {actual}")
    return diags


# -- transformations --------------------------------------------------------------


def reverse_network(net: Network) -> Network:
    """Reverse every arc and swap source and sink; arc ids are preserved."""
    arcs = [Arc(a.id, a.head, a.tail, a.cost, a.contrib, a.group) for a in net.arcs]
    topo = None if net.topo is None else tuple(reversed(net.topo))
    return Network(net.nodes, arcs, net.sink, net.source, net.dead, topo)


def _is_exact(values) -> bool:
    return all(isinstance(v, Rational) for v in values)


def decompose_flow(
    net: Network, sol: ArcFlowSolution, tol: float = FLOW_TOL
) -> list[tuple[Path, Any]]:
    """Split an arc flow into source-sink paths with multiplicities.

    Each round walks from the source along arcs with positive residual flow,
    taking the smallest arc id at every node, and subtracts the bottleneck.
    Integer/Fraction inputs are decomposed exactly; floats use ``tol``.
    """
    exact = _is_exact(sol.flow.values())
    eps = 0 if exact else tol
    resid = {a: v for a, v in sol.flow.items() if v > eps}
    for a, v in sol.flow.items():
        if v < -eps:
            raise ConservationViolated(f"negative flow {v} on arc {a}")

    n = len(net.nodes)
    balance = [0] * n
    for a, v in resid.items():
        arc = net.arcs[a]
        balance[net.index[arc.tail]] -= v
        balance[net.index[arc.head]] += v
    s, t = net.index[net.source], net.index[net.sink]
    scale = 1 + max((abs(v) for v in resid.values()), default=0)
    for i in range(n):
        if i in (s, t):
            continue
        if abs(balance[i]) > eps * scale * max(1, len(net.in_arcs[i]) + len(net.out_arcs[i])):
            raise ConservationViolated(f"node {net.nodes[i]!r} has imbalance {balance[i]}")
    slack = eps * scale * max(1, len(net.arcs))
    if abs(-balance[s] - balance[t]) > slack:
        raise ConservationViolated("source outflow differs from sink inflow")
    if abs(balance[t] - sol.total) > slack:
        raise ConservationViolated(f"sink inflow {balance[t]} differs from total {sol.total}")

    paths = []
    while True:
        v = net.source
        chain = []
        while v != net.sink:
            nxt = None
            for a in net.out_arcs[net.index[v]]:
                if resid.get(a, 0) > eps:
                    nxt = a
                    break
            if nxt is None:
                if v == net.source:
                    break
                raise ConservationViolated(f"flow stuck at node {v!r}")
            chain.append(nxt)
            v = net.arcs[nxt].head
        if not chain:
            break
        mult = min(resid[a] for a in chain)
        for a in chain:
            r = resid[a] - mult
            resid[a] = r if r > eps else 0
        paths.append((Path.from_arcs(net, chain), mult))
    leftover = [a for a, r in resid.items() if r > eps]
    if leftover:
        raise ConservationViolated(f"flow left on arcs {leftover[:5]} after decomposition")
    return paths


def enumerate_paths(net: Network, limit: int = 10**5, live_only: bool = True) -> list[Path]:
    """All source-sink paths (depth-first, arc-id order). Test oracle helper."""
    out: list[Path] = []
    stack: list[tuple[Hashable, list[int]]] = [(net.source, [])]
    while stack:
        v, chain = stack.pop()
        if v == net.sink:
            out.append(Path.from_arcs(net, chain))
            if len(out) > limit:
                raise ValueError(f"more than {limit} paths")
            continue
        for a in reversed(net.out_arcs[net.index[v]]):
            if live_only and a in net.dead:
                continue
            stack.append((net.arcs[a].head, chain + [a]))
    return out


def exact_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)
