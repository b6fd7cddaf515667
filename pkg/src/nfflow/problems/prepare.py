"""Bundle an instance with its network, family and starting incumbent."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from ..network import Network, Path, SideSystem
from . import csp, ooebpp
from .families import ArcFamily, make_family
from .heuristics import primal_heuristic
from .instances import CspInstance, OoebppInstance

NETWORKS = ("standard", "waste-limited", "auto")


@dataclass
class Prepared:
    instance: CspInstance | OoebppInstance
    net: Network
    sides: SideSystem
    family: ArcFamily
    z_ub: int
    incumbent: list[list[int]]
    network: str
    pool: list[Path] = field(default_factory=list)
    decode: Callable[[Network, Path], list[int]] | None = None

    @property
    def kind(self) -> str:
        return "csp" if isinstance(self.instance, CspInstance) else "ooebpp"


def default_family(inst) -> str:
    return "fa:1" if isinstance(inst, CspInstance) else "singleton"


def csp_network(inst: CspInstance, choice: str, z_ub: int) -> tuple[str, Network, SideSystem]:
    if choice not in NETWORKS:
        raise ValueError(f"unknown network {choice!r}")
    if choice == "standard":
        return ("standard", *csp.build_csp_standard(inst))
    limited = csp.build_csp_waste_limited(inst, z_ub=z_ub)
    if choice == "waste-limited":
        return ("waste-limited", *limited)
    std = csp.build_csp_standard(inst)
    if limited[0].num_live <= std[0].num_live:
        return ("waste-limited", *limited)
    return ("standard", *std)


def prepare(inst, network: str = "auto", family: str | None = None) -> Prepared:
    z_ub, sol = primal_heuristic(inst)
    if isinstance(inst, CspInstance):
        name, net, sides = csp_network(inst, network, z_ub)
        to_path, decode = csp.pattern_path, csp.decode_path
    elif isinstance(inst, OoebppInstance):
        name = "ooebpp"
        net, sides = ooebpp.build_ooebpp(inst)
        to_path, decode = ooebpp.bin_path, ooebpp.decode_path
    else:
        raise TypeError(type(inst).__name__)
    pool = []
    for pat in sol:
        p = to_path(net, pat)
        if p is not None and p not in pool:
            pool.append(p)
    fam = make_family(family or default_family(inst), net)
    return Prepared(inst, net, sides, fam, z_ub, sol, name, pool, decode)
