"""Arc-flow network for ordered open-end bin packing.

A node ``(i, load)`` means item ``i`` is next and the open bin already holds
``load <= W - 1``. From each state an item arc packs item ``i`` and keeps the
bin open, a dummy arc skips it, and a sink arc packs it as the last
(overflowing) item and closes the bin at cost 1. Only states reachable from
``(1, 0)`` are created.
"""

from __future__ import annotations

from ..network import Arc, Network, Path, SideSystem, make_contrib
from .instances import OoebppInstance

SINK = "sink"
ITEM, DUMMY, CLOSE = "item", "dummy", "close"


def build_ooebpp(inst: OoebppInstance) -> tuple[Network, SideSystem]:
    W, seq, m = inst.W, inst.seq, inst.m
    if m == 0:
        raise ValueError("empty item sequence")
    level = {0}
    nodes = []
    arcs = []
    for i in range(1, m + 1):
        w = seq[i - 1]
        nxt = set()
        for load in sorted(level):
            u = (i, load)
            nodes.append(u)
            if i < m:
                if load + w <= W - 1:
                    arcs.append((u, (i + 1, load + w), 0, i, ITEM))
                    nxt.add(load + w)
                arcs.append((u, (i + 1, load), 0, None, DUMMY))
                nxt.add(load)
            arcs.append((u, SINK, 1, i, CLOSE))
        level = nxt
    nodes.append(SINK)
    net = Network(
        nodes,
        [
            Arc(k, t, h, c, make_contrib({i - 1: 1}) if i is not None else (), (kind, t[0]))
            for k, (t, h, c, i, kind) in enumerate(arcs)
        ],
        (1, 0),
        SINK,
    )
    return net, SideSystem.from_network(net, [1] * m)


def bin_path(net: Network, items) -> Path | None:
    """Path for a bin holding the (0-based) item positions ``items``."""
    chosen = sorted(items)
    if not chosen:
        return None
    last = chosen[-1] + 1
    want = set(i + 1 for i in chosen)
    u = net.source
    chain = []
    while True:
        i = u[0]
        if i == last:
            kind = CLOSE
        elif i in want:
            kind = ITEM
        else:
            kind = DUMMY
        nxt = None
        for a in net.out_arcs[net.index[u]]:
            if a not in net.dead and net.arcs[a].group[0] == kind:
                nxt = a
                break
        if nxt is None:
            return None
        chain.append(nxt)
        if kind == CLOSE:
            return Path.from_arcs(net, chain)
        u = net.arcs[nxt].head


def decode_path(net: Network, path: Path) -> list[int]:
    """0-based item positions packed by ``path``."""
    return [net.arcs[a].tail[0] - 1 for a in path.arcs if net.arcs[a].group[0] != DUMMY]
