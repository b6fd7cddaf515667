"""Arc-flow networks for cutting stock / bin packing.

Nodes are roll positions ``0..W`` (source 0, sink W). Item arcs are generated
in non-increasing width order with at most ``d_i`` consecutive copies of each
item, which removes symmetric patterns. Waste arcs ``(v, W)`` close a roll.
Every arc leaving node 0 costs 1, so the objective counts rolls.
"""

from __future__ import annotations

from ..errors import InfeasibleBudget
from ..network import Arc, Network, Path, SideSystem, make_contrib
from .instances import CspInstance

WASTE = "waste"


def _item_tails(inst: CspInstance) -> list[list[int]]:
    W = inst.W
    reach = {0}
    tails = []
    for w, d in inst.items:
        mine: set[int] = set()
        for _ in range(d):
            grew = False
            for v in sorted(reach, reverse=True):
                if v + w <= W and v not in mine:
                    mine.add(v)
                    reach.add(v + w)
                    grew = True
            if not grew:
                break
        tails.append(sorted(mine))
    return tails


def _assemble(inst: CspInstance, tails: list[list[int]], waste_from: int) -> tuple[Network, SideSystem]:
    W = inst.W
    nodes = {0, W}
    out: dict[int, list[int]] = {}
    for (w, _), ts in zip(inst.items, tails):
        for v in ts:
            nodes.add(v)
            nodes.add(v + w)
            out.setdefault(v, []).append(w)
    # keep only arcs on some 0 -> W path
    fwd = {0}
    for v in sorted(nodes):
        if v in fwd:
            fwd.update(v + w for w in out.get(v, ()))
    bwd = {W} | {v for v in nodes if v >= waste_from}
    for v in sorted(nodes, reverse=True):
        if any(v + w in bwd for w in out.get(v, ())):
            bwd.add(v)
    live = fwd & bwd
    arcs = []
    kept_nodes = {0, W}
    for k, ((w, _), ts) in enumerate(zip(inst.items, tails)):
        for v in ts:
            if v in live and v + w in live:
                arcs.append((v, v + w, k))
                kept_nodes.update((v, v + w))
    for v in sorted(kept_nodes):
        if waste_from <= v < W:
            arcs.append((v, W, None))
    net = Network(
        sorted(kept_nodes),
        [
            Arc(i, t, h, 1 if t == 0 else 0, make_contrib({k: 1}) if k is not None else (),
                k if k is not None else WASTE)
            for i, (t, h, k) in enumerate(arcs)
        ],
        0,
        W,
    )
    return net, SideSystem.from_network(net, [d for _, d in inst.items])


def build_csp_standard(inst: CspInstance) -> tuple[Network, SideSystem]:
    """Standard position network with non-increasing width ordering."""
    inst = inst.merged()
    return _assemble(inst, _item_tails(inst), 0)


def default_max_waste(inst: CspInstance, z_ub: int) -> int:
    """Per-roll waste allowed when searching for a solution with ``z_ub - 1`` rolls.

    Clamped at 0: a negative value means no improving solution exists.
    """
    return max(0, (z_ub - 1) * inst.W - inst.total_width)


def build_csp_waste_limited(inst: CspInstance, max_waste: int | None = None,
                            z_ub: int | None = None) -> tuple[Network, SideSystem]:
    """Network restricted to patterns whose waste is at most ``max_waste``.

    Item arcs are back-propagated from the node set ``{W - max_waste, ..., W}``:
    items are scanned from the narrowest (last built) to the widest and each
    item's arcs by decreasing tail, keeping an arc only if its head already
    reaches the final positions.
    """
    if max_waste is None:
        if z_ub is None:
            raise ValueError("give max_waste or z_ub")
        max_waste = default_max_waste(inst, z_ub)
    if max_waste < 0:
        raise InfeasibleBudget(f"waste budget {max_waste} is negative")
    inst = inst.merged()
    W = inst.W
    tails = _item_tails(inst)
    target = set(range(max(0, W - max_waste), W + 1))
    kept: list[list[int]] = [[] for _ in tails]
    for k in reversed(range(len(tails))):
        w = inst.items[k][0]
        for v in sorted(tails[k], reverse=True):
            if v + w in target:
                kept[k].append(v)
                target.add(v)
        kept[k].sort()
    return _assemble(inst, kept, max(0, W - max_waste))


def pattern_path(net: Network, pattern) -> Path | None:
    """Network path cutting the given widths, or ``None`` if the network lacks one."""
    v = net.source
    chain = []
    for w in sorted(pattern, reverse=True):
        nxt = None
        for a in net.out_arcs[net.index[v]]:
            arc = net.arcs[a]
            if a not in net.dead and arc.group != WASTE and arc.head - arc.tail == w:
                nxt = a
                break
        if nxt is None:
            return None
        chain.append(nxt)
        v = net.arcs[nxt].head
    if v != net.sink:
        nxt = None
        for a in net.out_arcs[net.index[v]]:
            if a not in net.dead and net.arcs[a].group == WASTE:
                nxt = a
                break
        if nxt is None:
            return None
        chain.append(nxt)
    return Path.from_arcs(net, chain)


def decode_path(net: Network, path: Path) -> list[int]:
    return [net.arcs[a].head - net.arcs[a].tail for a in path.arcs if net.arcs[a].group != WASTE]
