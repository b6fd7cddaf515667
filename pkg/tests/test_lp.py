import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from nfflow.lp import EQ, GE, INFEASIBLE, LE, OPTIMAL, UNBOUNDED, LpModel


def test_single_covering_row():
    lp = LpModel()
    r = lp.add_row(GE, 1.0)
    lp.add_column(1.0, {r: 1.0})
    res = lp.solve()
    assert res.status == OPTIMAL
    assert res.objective == pytest.approx(1.0)
    assert res.duals[0] == pytest.approx(1.0)
    assert res.reduced_costs[0] == pytest.approx(0.0)


def test_two_column_sum():
    lp = LpModel()
    r = lp.add_row(GE, 2.0)
    lp.add_column(1.0, {r: 1.0})
    lp.add_column(1.0, {r: 1.0})
    res = lp.solve()
    assert res.objective == pytest.approx(2.0)
    assert res.x.sum() == pytest.approx(2.0)


def test_infeasible_and_unbounded():
    lp = LpModel()
    r = lp.add_row(LE, -1.0)
    lp.add_column(1.0, {r: 1.0})
    assert lp.solve().status == INFEASIBLE

    lp = LpModel()
    r = lp.add_row(GE, 1.0)
    lp.add_column(-1.0, {r: 1.0})
    assert lp.solve().status == UNBOUNDED


def test_duplicate_columns_are_flagged():
    lp = LpModel()
    r = lp.add_row(GE, 1.0)
    lp.add_column(2.0, {r: 1.0})
    lp.add_column(3.0, {r: 1.0})
    j = lp.add_column(2.0, {r: 1.0})
    assert lp.duplicates == [(j, 0)]


def test_bad_indices_rejected():
    lp = LpModel()
    with pytest.raises(IndexError):
        lp.add_column(1.0, {0: 1.0})
    with pytest.raises(IndexError):
        lp.add_row(GE, 1.0, {3: 1.0})
    with pytest.raises(ValueError):
        lp.add_row("<>", 1.0)


def test_bounded_columns():
    lp = LpModel()
    r = lp.add_row(GE, 5.0)
    lp.add_column(1.0, {r: 1.0}, 0.0, 2.0)
    lp.add_column(3.0, {r: 1.0})
    res = lp.solve()
    assert res.objective == pytest.approx(2.0 + 9.0)
    assert res.x[0] == pytest.approx(2.0)


@st.composite
def random_lps(draw):
    m = draw(st.integers(1, 5))
    n = draw(st.integers(1, 7))
    coef = st.integers(-3, 4)
    A = np.array([[draw(coef) for _ in range(n)] for _ in range(m)], float)
    b = np.array([draw(st.integers(-4, 8)) for _ in range(m)], float)
    c = np.array([draw(st.integers(0, 6)) for _ in range(n)], float)
    senses = [draw(st.sampled_from([GE, LE, EQ])) for _ in range(m)]
    ub = [draw(st.sampled_from([math.inf, 1.0, 3.0])) for _ in range(n)]
    return A, b, c, senses, ub


def build(A, b, c, senses, ub):
    lp = LpModel()
    for i in range(len(b)):
        lp.add_row(senses[i], b[i])
    for j in range(len(c)):
        lp.add_column(c[j], {i: A[i, j] for i in range(len(b))}, 0.0, ub[j])
    return lp


def reference(A, b, c, senses, ub):
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for i, s in enumerate(senses):
        if s == GE:
            A_ub.append(-A[i]); b_ub.append(-b[i])
        elif s == LE:
            A_ub.append(A[i]); b_ub.append(b[i])
        else:
            A_eq.append(A[i]); b_eq.append(b[i])
    res = linprog(c, A_ub=np.array(A_ub) if A_ub else None, b_ub=b_ub or None,
                  A_eq=np.array(A_eq) if A_eq else None, b_eq=b_eq or None,
                  bounds=[(0, None if u == math.inf else u) for u in ub], method="highs")
    return res


@settings(max_examples=150, deadline=None)
@given(random_lps())
def test_matches_reference_solver(case):
    A, b, c, senses, ub = case
    res = build(*case).solve()
    ref = reference(*case)
    if ref.status == 2:
        assert res.status == INFEASIBLE
        return
    assert ref.status == 0  # costs are nonnegative, so bounded
    assert res.status == OPTIMAL
    assert res.objective == pytest.approx(ref.fun, abs=1e-6)
    # primal feasibility of the returned point
    x = res.x
    assert np.all(x >= -1e-9) and all(x[j] <= ub[j] + 1e-9 for j in range(len(c)))
    lhs = A @ x
    for i, s in enumerate(senses):
        if s == GE:
            assert lhs[i] >= b[i] - 1e-7
        elif s == LE:
            assert lhs[i] <= b[i] + 1e-7
        else:
            assert lhs[i] == pytest.approx(b[i], abs=1e-7)


@settings(max_examples=100, deadline=None)
@given(random_lps())
def test_strong_duality_without_upper_bounds(case):
    A, b, c, senses, _ = case
    ub = [math.inf] * len(c)
    res = build(A, b, c, senses, ub).solve()
    if res.status != OPTIMAL:
        return
    y = res.duals
    assert res.dual_objective == pytest.approx(res.objective, abs=1e-6)
    assert float(b @ y) == pytest.approx(res.objective, abs=1e-6)
    # dual feasibility: reduced costs nonnegative, sign of y matches the row sense
    assert np.all(c - A.T @ y >= -1e-7)
    for i, s in enumerate(senses):
        if s == GE:
            assert y[i] >= -1e-9
        elif s == LE:
            assert y[i] <= 1e-9


@settings(max_examples=80, deadline=None)
@given(random_lps(), st.integers(0, 6), st.integers(1, 4))
def test_warm_start_after_growth_matches_cold(case, extra_cost, extra_rhs):
    A, b, c, senses, ub = case
    lp = build(*case)
    lp.solve()
    j = lp.add_column(float(extra_cost), {0: 1.0})
    r = lp.add_row(GE, float(extra_rhs), {j: 1.0})
    warm = lp.solve()
    cold_model = lp.copy()
    cold_model.reset_basis()
    cold = cold_model.solve()
    assert warm.status == cold.status
    if warm.status == OPTIMAL:
        assert warm.objective == pytest.approx(cold.objective, abs=1e-6)
        assert warm.x[j] >= extra_rhs - 1e-7
    assert r == len(b)
