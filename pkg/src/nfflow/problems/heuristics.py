"""Constructive upper bounds."""

from __future__ import annotations

from .instances import CspInstance, OoebppInstance


def first_fit_decreasing(inst: CspInstance) -> list[list[int]]:
    """Rolls as lists of widths."""
    rolls: list[list[int]] = []
    loads: list[int] = []
    for w in sorted(inst.expanded, reverse=True):
        for k, load in enumerate(loads):
            if load + w <= inst.W:
                rolls[k].append(w)
                loads[k] += w
                break
        else:
            rolls.append([w])
            loads.append(w)
    return rolls


def next_fit_overflow(inst: OoebppInstance) -> list[list[int]]:
    """Bins as lists of 0-based item positions; an item that does not fit closes the bin."""
    bins: list[list[int]] = []
    cur: list[int] = []
    load = 0
    for i, w in enumerate(inst.seq):
        cur.append(i)
        if load + w <= inst.W - 1:
            load += w
        else:
            bins.append(cur)
            cur, load = [], 0
    if cur:
        bins.append(cur)
    return bins


def primal_heuristic(inst) -> tuple[int, list[list[int]]]:
    sol = first_fit_decreasing(inst) if isinstance(inst, CspInstance) else next_fit_overflow(inst)
    return len(sol), sol


def material_bound(inst) -> int:
    """Capacity lower bound: total size over the most one container can hold."""
    if isinstance(inst, CspInstance):
        return -(-inst.total_width // inst.W)
    if inst.m == 0:
        return 0
    cap = inst.W - 1 + max(inst.seq)
    return -(-sum(inst.seq) // cap)
