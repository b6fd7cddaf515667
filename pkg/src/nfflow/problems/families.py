"""Arc families: partitions of (some of) the arcs into branching groups."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import UnsupportedKind
from ..network import Network
from .csp import WASTE


@dataclass(frozen=True)
class ArcFamily:
    """Pairwise disjoint arc groups. Arcs outside every group are never branched on."""

    name: str
    groups: tuple[frozenset[int], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for g in self.groups:
            if seen & g:
                raise ValueError("arc groups overlap")
            seen |= g

    def group_of(self) -> dict[int, int]:
        return {a: k for k, g in enumerate(self.groups) for a in g}


def _from_keys(name, net: Network, key) -> ArcFamily:
    acc: dict = {}
    for arc in net.arcs:
        if arc.id in net.dead:
            continue
        k = key(arc)
        if k is not None:
            acc.setdefault(k, set()).add(arc.id)
    groups = sorted((frozenset(g) for g in acc.values()), key=min)
    return ArcFamily(name, tuple(groups))


def _is_csp(net: Network) -> bool:
    return all(isinstance(a.tail, int) for a in net.arcs)


def make_family(kind: str, net: Network) -> ArcFamily:
    """Build a family by name: ``fa:k``, ``fb:k``, ``singleton`` or ``tail-node``.

    ``fa:k`` groups arcs whose tail positions fall in the same block of ``k``
    consecutive positions. ``fb:k`` groups the arcs of one item by
    ``floor(tail * k / W)``, leaving waste arcs ungrouped. Both need a
    position network.
    """
    if kind == "singleton":
        return _from_keys(kind, net, lambda a: a.id)
    if kind == "tail-node":
        return _from_keys(kind, net, lambda a: a.tail)
    name, _, arg = kind.partition(":")
    if name not in ("fa", "fb") or not arg:
        raise UnsupportedKind(f"unknown arc family {kind!r}")
    try:
        k = int(arg)
    except ValueError:
        raise UnsupportedKind(f"bad family parameter in {kind!r}") from None
    if k < 1:
        raise UnsupportedKind("family parameter must be at least 1")
    if not _is_csp(net):
        raise UnsupportedKind(f"family {kind!r} needs a position network")
    if name == "fa":
        return _from_keys(kind, net, lambda a: a.tail // k)
    W = net.sink
    return _from_keys(kind, net, lambda a: None if a.group == WASTE else (a.group, a.tail * k // W))
