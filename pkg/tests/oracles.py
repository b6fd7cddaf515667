"""Independent reference computations used only by the tests.

LP values come from scipy's HiGHS, never from the package's own engine.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import linprog

from nfflow.network import enumerate_paths


def arc_flow_lp(net, sides, lower=None):
    """Direct LP over the full arc-flow model (every live arc, every node).

    ``lower`` optionally maps arc ids to flow lower bounds.
    """
    live = net.live_arcs()
    n = len(net.nodes)
    nv = len(live) + 1  # arcs then z
    A_eq = np.zeros((n, nv))
    for j, a in enumerate(live):
        A_eq[net.tail_idx[a], j] -= 1
        A_eq[net.head_idx[a], j] += 1
    A_eq[net.index[net.source], -1] = 1
    A_eq[net.index[net.sink], -1] = -1
    A_ub = np.zeros((sides.m, nv))
    for j, a in enumerate(live):
        for k, c in net.arcs[a].contrib:
            A_ub[k, j] = -c
    c = np.array([net.arcs[a].cost for a in live] + [0.0])
    lower = lower or {}
    bounds = [(lower.get(a, 0), None) for a in live] + [(0, None)]
    res = linprog(c, A_ub=A_ub, b_ub=-np.array(sides.rhs, float), A_eq=A_eq, b_eq=np.zeros(n),
                  bounds=bounds, method="highs")
    return res.fun if res.status == 0 else None


def path_lp(net, sides, paths=None):
    """LP over all enumerated source-sink paths."""
    paths = enumerate_paths(net) if paths is None else paths
    if not paths:
        return None
    A = np.zeros((sides.m, len(paths)))
    for j, p in enumerate(paths):
        for k, c in p.column:
            A[k, j] = c
    c = np.array([p.cost for p in paths], float)
    res = linprog(c, A_ub=-A, b_ub=-np.array(sides.rhs, float), bounds=[(0, None)] * len(paths), method="highs")
    return res.fun if res.status == 0 else None


def integer_solutions(net, sides, max_paths, extra_rows=()):
    """All multisets of at most ``max_paths`` live paths satisfying every row, as sorted tuples of path arcs."""
    paths = enumerate_paths(net)
    out = set()
    for r in range(max_paths + 1):
        for combo in itertools.combinations_with_replacement(range(len(paths)), r):
            cover = [0] * sides.m
            used: dict[int, int] = {}
            for i in combo:
                for k, c in paths[i].column:
                    cover[k] += c
                for a in paths[i].arcs:
                    used[a] = used.get(a, 0) + 1
            if any(cover[k] < sides.rhs[k] for k in range(sides.m)):
                continue
            if any(sum(used.get(a, 0) for a in ids) < rhs for ids, rhs in extra_rows):
                continue
            out.add(tuple(sorted(paths[i].arcs for i in combo)))
    return out


def min_path_reduced_cost(net, beta):
    """Minimum reduced cost over enumerated paths, exact for Fraction duals."""
    return min(p.reduced_cost(beta) for p in enumerate_paths(net))


def exact_min_reduced_cost(net, beta):
    """Minimum path reduced cost under ``beta`` in exact rationals.

    Written independently of the package: a plain DP over a topological order
    computed here from the live arcs.
    """
    from fractions import Fraction

    beta = [Fraction(b) for b in beta]
    live = [a for a in net.arcs if a.id not in net.dead]
    indeg = {v: 0 for v in net.nodes}
    out = {v: [] for v in net.nodes}
    for a in live:
        indeg[a.head] += 1
        out[a.tail].append(a)
    order = [v for v in net.nodes if indeg[v] == 0]
    for v in order:
        for a in out[v]:
            indeg[a.head] -= 1
            if indeg[a.head] == 0:
                order.append(a.head)
    dist = {net.source: Fraction(0)}
    for v in order:
        if v not in dist:
            continue
        for a in out[v]:
            rc = Fraction(a.cost) - sum(c * beta[k] for k, c in a.contrib)
            d = dist[v] + rc
            if a.head not in dist or d < dist[a.head]:
                dist[a.head] = d
    return dist.get(net.sink)
