"""Exhaustive solvers for small instances, used to cross-check the exact method."""

from __future__ import annotations

from functools import lru_cache
from math import prod

from ..errors import TooLarge
from .instances import CspInstance, OoebppInstance

MAX_CSP_STATES = 200_000
MAX_OOEBPP_ITEMS = 12


def _csp(inst: CspInstance, max_states: int) -> int:
    inst = inst.merged()
    W = inst.W
    widths = [w for w, _ in inst.items]
    demand = tuple(d for _, d in inst.items)
    if prod(d + 1 for d in demand) > max_states:
        raise TooLarge("demand vector space exceeds the brute-force limit")
    n = len(widths)

    def patterns(rem, first):
        # maximal patterns within rem that contain item `first`
        out = []
        q = [0] * n
        q[first] = 1

        def rec(j, load):
            if j == n:
                slack = W - load
                if all(q[i] == rem[i] or widths[i] > slack for i in range(n)):
                    out.append(tuple(q))
                return
            if j == first:
                hi = min(rem[j], (W - load) // widths[j] + 1)
                for c in range(hi, 0, -1):
                    q[j] = c
                    rec(j + 1, load + (c - 1) * widths[j])
                q[j] = 1
                return
            hi = min(rem[j], (W - load) // widths[j])
            for c in range(hi, -1, -1):
                q[j] = c
                rec(j + 1, load + c * widths[j])
            q[j] = 0

        rec(0, widths[first])
        return out

    @lru_cache(maxsize=None)
    def best(rem):
        first = next((i for i, r in enumerate(rem) if r), None)
        if first is None:
            return 0
        return 1 + min(best(tuple(r - c for r, c in zip(rem, q))) for q in patterns(rem, first))

    return best(demand)


def _ooebpp(inst: OoebppInstance) -> int:
    m, W, seq = inst.m, inst.W, inst.seq
    if m > MAX_OOEBPP_ITEMS:
        raise TooLarge(f"more than {MAX_OOEBPP_ITEMS} items")
    full = (1 << m) - 1
    # a block is feasible when all but its last item fit below the capacity
    ok = [False] * (full + 1)
    for mask in range(1, full + 1):
        top = mask.bit_length() - 1
        ok[mask] = sum(seq[i] for i in range(top) if mask >> i & 1) <= W - 1
    dp = [0] * (full + 1)
    for mask in range(1, full + 1):
        low = mask & -mask
        rest = mask ^ low
        best = m + 1
        sub = rest
        while True:
            block = sub | low
            if ok[block]:
                best = min(best, 1 + dp[mask ^ block])
            if sub == 0:
                break
            sub = (sub - 1) & rest
        dp[mask] = best
    return dp[full]


def brute_force(inst, max_states: int = MAX_CSP_STATES) -> int:
    """Optimal number of rolls or bins by exhaustive search; raises ``TooLarge``."""
    if isinstance(inst, CspInstance):
        return _csp(inst, max_states)
    if isinstance(inst, OoebppInstance):
        return _ooebpp(inst)
    raise TypeError(type(inst).__name__)
