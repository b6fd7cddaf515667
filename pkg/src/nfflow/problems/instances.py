"""Instance types, BPPLIB-style text I/O and a seeded generator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, ParseError


@dataclass(frozen=True)
class CspInstance:
    """Cutting stock: rolls of length ``W``, items as ``(width, demand)`` pairs."""

    W: int
    items: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple((int(w), int(d)) for w, d in self.items))
        if self.W <= 0:
            raise DomainError("roll length must be positive")
        for w, d in self.items:
            if w <= 0 or w > self.W:
                raise DomainError(f"item width {w} outside (0, {self.W}]")
            if d < 1:
                raise DomainError(f"item demand {d} must be at least 1")

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def total_width(self) -> int:
        return sum(w * d for w, d in self.items)

    @property
    def expanded(self) -> list[int]:
        return [w for w, d in self.items for _ in range(d)]

    def merged(self) -> "CspInstance":
        """Equal widths merged, ordered by non-increasing width."""
        acc: dict[int, int] = {}
        for w, d in self.items:
            acc[w] = acc.get(w, 0) + d
        return CspInstance(self.W, tuple(sorted(acc.items(), key=lambda t: -t[0])))


@dataclass(frozen=True)
class OoebppInstance:
    """Ordered open-end bin packing: capacity ``W`` and an item sequence."""

    W: int
    seq: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "seq", tuple(int(w) for w in self.seq))
        if self.W <= 0:
            raise DomainError("bin capacity must be positive")
        for w in self.seq:
            if w < 1:
                raise DomainError(f"item weight {w} must be at least 1")

    @property
    def m(self) -> int:
        return len(self.seq)


FORMATS = ("bpp", "csp", "ooebpp")


def _lines(text):
    for no, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if s:
            yield no, s.split()


def _int(tok, no):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer, got {tok!r}", no) from None


def parse_instance(text: str, fmt: str):
    """Parse ``bpp`` (n, W, n weights), ``csp`` (n, W, n ``w d`` lines) or ``ooebpp``."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}")
    lines = list(_lines(text))
    if len(lines) < 2:
        raise ParseError("expected item count and capacity", len(lines) + 1)
    n = _int(lines[0][1][0], lines[0][0])
    W = _int(lines[1][1][0], lines[1][0])
    body = lines[2:]
    if len(body) != n:
        last = body[-1][0] if body else lines[1][0]
        raise ParseError(f"expected {n} item lines, found {len(body)}", last)
    if W <= 0:
        raise DomainError("capacity must be positive")
    if fmt == "csp":
        items = []
        for no, toks in body:
            if len(toks) != 2:
                raise ParseError("expected 'width demand'", no)
            w, d = _int(toks[0], no), _int(toks[1], no)
            if w <= 0 or d < 1:
                raise DomainError(f"line {no}: width and demand must be positive")
            items.append((w, d))
        return CspInstance(W, tuple(items))
    weights = []
    for no, toks in body:
        if len(toks) != 1:
            raise ParseError("expected a single weight", no)
        w = _int(toks[0], no)
        if w <= 0:
            raise DomainError(f"line {no}: weight must be positive")
        weights.append(w)
    if fmt == "bpp":
        return CspInstance(W, tuple((w, 1) for w in weights))
    return OoebppInstance(W, tuple(weights))


def format_instance(inst, fmt: str | None = None) -> str:
    if isinstance(inst, OoebppInstance):
        return "\n".join([str(inst.m), str(inst.W), *map(str, inst.seq)]) + "\n"
    if fmt == "bpp":
        ws = inst.expanded
        return "\n".join([str(len(ws)), str(inst.W), *map(str, ws)]) + "\n"
    rows = [f"{w} {d}" for w, d in inst.items]
    return "\n".join([str(inst.n), str(inst.W), *rows]) + "\n"


def generate_random(kind: str, n: int, W: int, weight_range: tuple[int, int],
                    demand_range: tuple[int, int] = (1, 1), seed: int = 0):
    """Seeded random instance.

    OOEBPP sequences are obtained by drawing weights and then ordering them by
    independent uniform sort keys.
    """
    rng = np.random.default_rng(seed)
    lo, hi = weight_range
    if kind == "csp":
        hi = min(hi, W)
        if not 0 < lo <= hi:
            raise DomainError("weight range must lie in (0, W]")
        ws = rng.integers(lo, hi + 1, size=n)
        ds = rng.integers(demand_range[0], demand_range[1] + 1, size=n)
        return CspInstance(W, tuple((int(w), int(d)) for w, d in zip(ws, ds)))
    if kind == "ooebpp":
        if lo < 1:
            raise DomainError("weights must be positive")
        ws = rng.integers(lo, hi + 1, size=n)
        keys = rng.random(n)
        order = np.argsort(keys, kind="stable")
        return OoebppInstance(W, tuple(int(ws[i]) for i in order))
    raise ValueError(f"unknown kind {kind!r}")
