"""Dense bounded revised simplex for small restricted master problems.

Rows are written with one logical variable each, ``a_i x + r_i = b_i``, whose
bounds encode the sense (``>=``: r <= 0, ``<=``: r >= 0, ``=``: r = 0). The
initial basis is all logicals (or the stored basis of the previous solve);
infeasibility is removed by a composite phase 1 that minimises the sum of
bound violations of the basic variables, so no big-M is needed inside the
engine. Dantzig pricing is used until more than ``degenerate_limit``
consecutive degenerate pivots occur, after which Bland's rule takes over until
the next nondegenerate pivot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GE, LE, EQ = ">=", "<=", "="

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"
ITER_LIMIT = "IterLimit"

PRIMAL_TOL = 1e-9
DUAL_TOL = 1e-9
PIVOT_TOL = 1e-9

INF = math.inf


@dataclass
class LpResult:
    status: str
    x: np.ndarray
    duals: np.ndarray
    reduced_costs: np.ndarray
    objective: float
    dual_objective: float
    iterations: int

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class LpModel:
    """``min c'x`` over bounded columns subject to ``>=``/``<=``/``=`` rows.

    Columns and rows can be appended at any time; ids never change. The basis
    of the last solve is kept and reused by the next one.
    """

    def __init__(self, max_iter: int = 10**7, degenerate_limit: int = 1000,
                 refactor_every: int = 100):
        self.obj: list[float] = []
        self.cols: list[dict[int, float]] = []
        self.lb: list[float] = []
        self.ub: list[float] = []
        self.senses: list[str] = []
        self.rhs: list[float] = []
        self.max_iter = max_iter
        self.degenerate_limit = degenerate_limit
        self.refactor_every = refactor_every
        self.duplicates: list[tuple[int, int]] = []
        self._signatures: dict[tuple, int] = {}
        self._basis: tuple[list[tuple[str, int]], set[tuple[str, int]]] | None = None
        self.last: LpResult | None = None

    @property
    def n(self) -> int:
        return len(self.obj)

    @property
    def m(self) -> int:
        return len(self.rhs)

    def add_column(self, obj: float, coefs: dict[int, float] | None = None,
                   lb: float = 0.0, ub: float = INF) -> int:
        coefs = {int(i): float(v) for i, v in (coefs or {}).items() if v != 0}
        for i, v in coefs.items():
            if not 0 <= i < self.m:
                raise IndexError(f"row {i} does not exist")
            if not math.isfinite(v):
                raise ValueError("coefficients must be finite")
        if not math.isfinite(obj):
            raise ValueError("objective coefficient must be finite")
        j = self.n
        sig = (float(obj), tuple(sorted(coefs.items())))
        if sig in self._signatures:
            self.duplicates.append((j, self._signatures[sig]))
        else:
            self._signatures[sig] = j
        self.obj.append(float(obj))
        self.cols.append(coefs)
        self.lb.append(float(lb))
        self.ub.append(float(ub))
        return j

    def add_row(self, sense: str, rhs: float, coefs: dict[int, float] | None = None) -> int:
        if sense not in (GE, LE, EQ):
            raise ValueError(f"unknown sense {sense!r}")
        i = self.m
        self.senses.append(sense)
        self.rhs.append(float(rhs))
        for j, v in (coefs or {}).items():
            if not 0 <= j < self.n:
                raise IndexError(f"column {j} does not exist")
            if v != 0:
                self.cols[j][i] = float(v)
        return i

    def set_bounds(self, j: int, lb: float | None = None, ub: float | None = None) -> None:
        if lb is not None:
            self.lb[j] = float(lb)
        if ub is not None:
            self.ub[j] = float(ub)

    def set_objective(self, j: int, c: float) -> None:
        self.obj[j] = float(c)

    def set_rhs(self, i: int, rhs: float) -> None:
        self.rhs[i] = float(rhs)

    def get_basis(self):
        if self._basis is None:
            return None
        return (list(self._basis[0]), set(self._basis[1]))

    def set_basis(self, basis) -> None:
        self._basis = None if basis is None else (list(basis[0]), set(basis[1]))

    def reset_basis(self) -> None:
        self._basis = None

    def copy(self) -> "LpModel":
        other = LpModel(self.max_iter, self.degenerate_limit, self.refactor_every)
        other.obj = list(self.obj)
        other.cols = [dict(c) for c in self.cols]
        other.lb = list(self.lb)
        other.ub = list(self.ub)
        other.senses = list(self.senses)
        other.rhs = list(self.rhs)
        other._signatures = dict(self._signatures)
        other._basis = self.get_basis()
        return other

    def matrix(self) -> np.ndarray:
        A = np.zeros((self.m, self.n))
        for j, col in enumerate(self.cols):
            for i, v in col.items():
                A[i, j] = v
        return A

    def solve(self, max_iter: int | None = None) -> LpResult:
        if self.n == 0 and self.m == 0:
            raise ValueError("empty model")
        res = _Simplex(self).run(self.max_iter if max_iter is None else max_iter)
        if res.status == ITER_LIMIT:
            # numerical trouble: retry once from the slack basis
            self._basis = None
            res = _Simplex(self).run(self.max_iter if max_iter is None else max_iter)
        self.last = res
        return res


class _Simplex:
    def __init__(self, model: LpModel):
        self.model = model
        m, n = model.m, model.n
        self.m, self.n = m, n
        A = model.matrix()
        self.A = np.hstack([A, np.eye(m)]) if m else np.zeros((0, n))
        self.b = np.array(model.rhs, dtype=float)
        self.c = np.concatenate([np.array(model.obj, dtype=float), np.zeros(m)])
        lb = list(model.lb)
        ub = list(model.ub)
        for s in model.senses:
            if s == GE:
                lb.append(-INF)
                ub.append(0.0)
            elif s == LE:
                lb.append(0.0)
                ub.append(INF)
            else:
                lb.append(0.0)
                ub.append(0.0)
        self.lb = np.array(lb, dtype=float)
        self.ub = np.array(ub, dtype=float)
        self.N = n + m

    def _key(self, j):
        return ("c", j) if j < self.n else ("r", j - self.n)

    def _index(self, key):
        kind, k = key
        if kind == "c":
            return k if k < self.n else None
        return self.n + k if k < self.m else None

    def _initial_basis(self):
        n, m = self.n, self.m
        at_upper = np.zeros(self.N, dtype=bool)
        stored = self.model._basis
        basic = None
        if stored is not None:
            keys, upper = stored
            idx = [self._index(k) for k in keys]
            if all(i is not None for i in idx) and len(set(idx)) == len(idx):
                present = set(idx)
                # rows added since the last solve enter with their logical basic
                for r in range(m):
                    if ("r", r) not in keys and n + r not in present:
                        idx.append(n + r)
                        present.add(n + r)
                if len(idx) == m:
                    basic = idx
                    for k in upper:
                        i = self._index(k)
                        if i is not None:
                            at_upper[i] = True
        if basic is None:
            basic = list(range(n, n + m))
            at_upper[:] = False
        basic_arr = np.array(basic, dtype=int)
        at_upper[basic_arr] = False
        # nonbasic variables must sit at a finite bound
        at_upper = np.where(np.isinf(self.lb), True, at_upper)
        at_upper = np.where(np.isinf(self.ub), False, at_upper)
        at_upper[basic_arr] = False
        return basic_arr, at_upper

    def _nonbasic_values(self, is_basic, at_upper):
        x = np.where(at_upper, self.ub, self.lb)
        x = np.where(np.isfinite(x), x, 0.0)
        x[is_basic] = 0.0
        return x

    def _factor(self, basic, x, is_basic):
        B = self.A[:, basic]
        Binv = np.linalg.inv(B)
        rhs = self.b - self.A[:, ~is_basic] @ x[~is_basic]
        x[basic] = Binv @ rhs
        return Binv

    def run(self, max_iter: int) -> LpResult:
        m, N = self.m, self.N
        A, c, lb, ub = self.A, self.c, self.lb, self.ub
        basic, at_upper = self._initial_basis()
        is_basic = np.zeros(N, dtype=bool)
        is_basic[basic] = True
        x = self._nonbasic_values(is_basic, at_upper)
        try:
            Binv = self._factor(basic, x, is_basic)
            if not np.all(np.isfinite(Binv)) or np.abs(Binv).max(initial=0.0) > 1e12:
                raise np.linalg.LinAlgError
        except np.linalg.LinAlgError:
            basic = np.arange(self.n, self.n + m)
            at_upper = np.zeros(N, dtype=bool)
            at_upper = np.where(np.isinf(lb), True, at_upper)
            is_basic = np.zeros(N, dtype=bool)
            is_basic[basic] = True
            x = self._nonbasic_values(is_basic, at_upper)
            Binv = self._factor(basic, x, is_basic)

        iters = 0
        since_refactor = 0
        degenerate = 0
        verified = False
        status = None
        while True:
            if iters >= max_iter:
                status = ITER_LIMIT
                break
            xB = x[basic]
            lbB, ubB = lb[basic], ub[basic]
            below = xB < lbB - PRIMAL_TOL
            above = xB > ubB + PRIMAL_TOL
            phase1 = bool(below.any() or above.any())
            if phase1:
                cB = np.where(below, -1.0, np.where(above, 1.0, 0.0))
                cfull = np.zeros(N)
            else:
                cB = c[basic]
                cfull = c
            y = cB @ Binv if m else np.zeros(0)
            d = cfull - (y @ A if m else 0.0)
            movable = ub > lb
            eligible = ~is_basic & movable & (
                (~at_upper & (d < -DUAL_TOL)) | (at_upper & (d > DUAL_TOL))
            )
            if not eligible.any():
                if since_refactor and not verified:
                    Binv = self._factor(basic, x, is_basic)
                    since_refactor = 0
                    verified = True
                    continue
                status = INFEASIBLE if phase1 else OPTIMAL
                break
            verified = False
            bland = degenerate > self.model.degenerate_limit
            cand = np.flatnonzero(eligible)
            q = int(cand[0]) if bland else int(cand[np.argmax(np.abs(d[cand]))])
            dirn = -1.0 if at_upper[q] else 1.0
            alpha = Binv @ A[:, q] if m else np.zeros(0)
            rate = -dirn * alpha
            ratios = np.full(m, INF)
            to_upper = np.zeros(m, dtype=bool)
            pos = rate > PIVOT_TOL
            neg = rate < -PIVOT_TOL
            if phase1:
                feas = ~below & ~above
                sel = pos & feas & np.isfinite(ubB)
                ratios[sel] = (ubB[sel] - xB[sel]) / rate[sel]
                to_upper[sel] = True
                sel = neg & feas & np.isfinite(lbB)
                ratios[sel] = (lbB[sel] - xB[sel]) / rate[sel]
                sel = pos & below
                ratios[sel] = (lbB[sel] - xB[sel]) / rate[sel]
                sel = neg & above
                ratios[sel] = (ubB[sel] - xB[sel]) / rate[sel]
                to_upper[sel] = True
            else:
                sel = pos & np.isfinite(ubB)
                ratios[sel] = (ubB[sel] - xB[sel]) / rate[sel]
                to_upper[sel] = True
                sel = neg & np.isfinite(lbB)
                ratios[sel] = (lbB[sel] - xB[sel]) / rate[sel]
            ratios = np.maximum(ratios, 0.0)
            flip = ub[q] - lb[q]
            t_row = ratios.min() if m else INF
            if not math.isfinite(t_row) and not math.isfinite(flip):
                if phase1:
                    # cannot happen for a correct phase-1 direction; restart cleanly
                    Binv = self._factor(basic, x, is_basic)
                    since_refactor = 0
                    iters += 1
                    continue
                status = UNBOUNDED
                break
            iters += 1
            if flip <= t_row:
                t = flip
                x[basic] = xB + rate * t
                x[q] = ub[q] if dirn > 0 else lb[q]
                at_upper[q] = dirn > 0
                degenerate = 0 if t > 1e-12 else degenerate + 1
                continue
            t = t_row
            ties = np.flatnonzero(ratios <= t + 1e-12)
            if bland:
                r = int(ties[np.argmin(basic[ties])])
            else:
                r = int(ties[np.argmax(np.abs(alpha[ties]))])
            leaving = int(basic[r])
            x[basic] = xB + rate * t
            x[q] = x[q] + dirn * t
            x[leaving] = ub[leaving] if to_upper[r] else lb[leaving]
            at_upper[leaving] = bool(to_upper[r])
            at_upper[q] = False
            is_basic[leaving] = False
            is_basic[q] = True
            basic[r] = q
            piv = alpha[r]
            row_r = Binv[r] / piv
            Binv -= np.outer(alpha, row_r)
            Binv[r] = row_r
            degenerate = 0 if t > 1e-12 else degenerate + 1
            since_refactor += 1
            if since_refactor >= self.model.refactor_every:
                Binv = self._factor(basic, x, is_basic)
                since_refactor = 0

        n = self.n
        cB = c[basic]
        y = cB @ Binv if m else np.zeros(0)
        d = c - (y @ A if m else 0.0)
        d[is_basic] = 0.0
        self.model._basis = (
            [self._key(int(j)) for j in basic],
            {self._key(int(j)) for j in np.flatnonzero(at_upper & ~is_basic)},
        )
        xs = x[:n].copy()
        obj = float(c[:n] @ xs)
        nb = ~is_basic
        dual_obj = float(self.b @ y + d[nb] @ x[nb]) if m else float(d[nb] @ x[nb])
        return LpResult(status, xs, y.copy(), d[:n].copy(), obj, dual_obj, iters)
