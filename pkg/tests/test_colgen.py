import csv
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import single_arc_network
from oracles import arc_flow_lp, min_path_reduced_cost, path_lp
from nfflow.colgen import (
    ARC_FLOW,
    PATH_FLOW,
    SCALE,
    alpha_from_beta,
    extract_min_path,
    price_multi,
    reduced_cost_field,
    safe_round,
    solve_master,
)
from nfflow.errors import DisconnectedArc, DualInfeasibleInput
from nfflow.network import Arc, Network, SideSystem, enumerate_paths, make_contrib
from nfflow.problems import CspInstance, OoebppInstance, build_csp_standard, build_ooebpp
from nfflow.problems.csp import decode_path as decode_csp_path


def test_zero_duals_give_unit_arc_costs(e1_net):
    net, sides = e1_net
    f = reduced_cost_field(net, sides, [0, 0])
    assert f.arc == [1] * len(net.arcs)
    assert f.min_path == 1


def test_field_values_on_small_example(e1_net):
    net, sides = e1_net
    f = reduced_cost_field(net, sides, [1, 0.5])
    assert f.arc == [0, 0, 0, 1, 0.5, 0]
    p = extract_min_path(f, 2)
    assert p.arcs == (1, 2)
    assert decode_csp_path(net, p) == [3, 3]


def test_dead_arc_is_disconnected(e1_net):
    net, sides = e1_net
    net.kill([1])
    f = reduced_cost_field(net, sides, [0, 0])
    assert f.arc[2] == math.inf
    with pytest.raises(DisconnectedArc):
        extract_min_path(f, 2)


def test_price_multi_returns_row_minima(e1_net):
    net, sides = e1_net
    paths = price_multi(net, sides, [2, 2])
    assert [(p.arcs, p.reduced_cost([2, 2])) for p in paths] == [((1, 2), -3), ((0, 5), -1)]
    assert price_multi(net, sides, [1, 0.5]) == []


def test_price_multi_respects_cap(e1_net):
    net, sides = e1_net
    assert len(price_multi(net, sides, [2, 2], max_columns=1)) == 1


def test_alpha_potentials_are_dual_feasible(e1_net):
    net, sides = e1_net
    beta = [Fraction(1), Fraction(1, 2)]
    alpha = alpha_from_beta(net, sides, beta)
    assert alpha[net.source] == 0
    for a in net.arcs:
        red = a.cost - sum(c * beta[k] for k, c in a.contrib)
        assert alpha[a.head] - alpha[a.tail] <= red
    # the sink potential equals the minimum path reduced cost
    assert alpha[net.sink] == 0


def test_alpha_rejects_infeasible_beta(e1_net):
    net, sides = e1_net
    with pytest.raises(DualInfeasibleInput):
        alpha_from_beta(net, sides, [Fraction(2), Fraction(0)])


def test_safe_round_keeps_exact_optimum(e1_net):
    net, sides = e1_net
    d = safe_round(net, sides, [1.0, 0.5])
    assert d.safe and d.bound == 2 and d.ceil_bound == 2
    assert d.scaled == (SCALE, SCALE // 2)


def test_safe_round_floors_small_excess(e1_net):
    net, sides = e1_net
    d = safe_round(net, sides, [1.0 + 3e-10, 0.5])
    assert d.safe and d.beta[0] == 1


def test_safe_round_flags_infeasible_dual(e1_net):
    net, sides = e1_net
    d = safe_round(net, sides, [1.0 + 1e-6, 0.5])
    assert not d.safe and d.bound == -math.inf and d.ceil_bound == -math.inf


def test_safe_round_ceils_packing_rows():
    # row 0 covering (demand 1), row 1 packing (at most 1 unit of the cheap arc)
    arcs = [
        Arc(0, "s", "t", 1, make_contrib({0: 1, 1: -1})),
        Arc(1, "s", "t", 3, make_contrib({0: 1})),
    ]
    net = Network(["s", "t"], arcs, "s", "t")
    sides = SideSystem.from_network(net, [2, -1])
    assert sides.kinds == ("covering", "packing")
    d = safe_round(net, sides, [3.0, 2.0 + 3e-10])
    assert d.scaled == (3 * SCALE, 2 * SCALE + 1)
    assert d.safe and d.bound == Fraction(4 * SCALE - 1, SCALE)
    st_ = solve_master(net, sides)
    assert st_.objective == pytest.approx(4.0)
    assert st_.dual.safe and st_.dual.ceil_bound == 4


def test_single_full_item_bound_is_one():
    net, sides = build_csp_standard(CspInstance(7, ((7, 1),)))
    st_ = solve_master(net, sides)
    assert st_.objective == pytest.approx(1.0)
    assert st_.dual.safe and st_.dual.bound == 1


@pytest.mark.parametrize("mode", [PATH_FLOW, ARC_FLOW])
def test_small_examples(mode, e1_net, e2):
    net, sides = e1_net
    st_ = solve_master(net, sides, mode)
    assert st_.objective == pytest.approx(2.0) and st_.dual.ceil_bound == 2
    net, sides = build_csp_standard(e2)
    st_ = solve_master(net, sides, mode)
    assert st_.objective == pytest.approx(2.0) and st_.dual.ceil_bound == 2


def test_iteration_log(tmp_path, monkeypatch, e1_net):
    log = tmp_path / "cg.csv"
    monkeypatch.setenv("NFFLOW_LOG", str(log))
    net, sides = e1_net
    st_ = solve_master(net, sides)
    rows = list(csv.reader(log.open()))
    assert rows[0] == ["iteration", "objective", "columns_added", "min_reduced_cost"]
    assert len(rows) == 1 + st_.iterations
    assert float(rows[-1][3]) >= -1e-9
    assert int(rows[-1][2]) == 0


def test_single_arc_master():
    net, sides = single_arc_network(cost=2, rhs=3)
    st_ = solve_master(net, sides)
    assert st_.objective == pytest.approx(6.0)
    assert st_.dual.bound == 6


csp_instances = st.builds(
    lambda W, ws, ds: CspInstance(W, tuple((min(w, W), d) for w, d in zip(ws, ds))),
    st.integers(4, 16),
    st.lists(st.integers(1, 16), min_size=1, max_size=5),
    st.lists(st.integers(1, 3), min_size=5, max_size=5),
)


@settings(max_examples=40, deadline=None)
@given(csp_instances)
def test_modes_and_direct_lp_agree(inst):
    net, sides = build_csp_standard(inst)
    direct = arc_flow_lp(net, sides)
    a = solve_master(net.copy(), sides, PATH_FLOW)
    b = solve_master(net.copy(), sides, ARC_FLOW)
    assert a.objective == pytest.approx(direct, abs=1e-6)
    assert b.objective == pytest.approx(direct, abs=1e-6)
    for s in (a, b):
        assert s.dual.safe
        assert min_path_reduced_cost(net, s.dual.beta) >= 0
        assert s.dual.bound <= direct + 1e-6


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 9), st.lists(st.integers(1, 9), min_size=1, max_size=5))
def test_ooebpp_master_matches_path_lp(W, seq):
    inst = OoebppInstance(W, tuple(min(w, W) for w in seq))
    net, sides = build_ooebpp(inst)
    st_ = solve_master(net, sides)
    assert st_.objective == pytest.approx(path_lp(net, sides), abs=1e-6)


@settings(max_examples=60, deadline=None)
@given(csp_instances, st.lists(st.fractions(0, 2, max_denominator=8), min_size=5, max_size=5))
def test_field_matches_path_enumeration(inst, beta):
    net, sides = build_csp_standard(inst)
    beta = beta[: sides.m]
    f = reduced_cost_field(net, sides, beta)
    paths = enumerate_paths(net)
    assert f.min_path == min(p.reduced_cost(beta) for p in paths)
    for a in net.live_arcs():
        through = [p.reduced_cost(beta) for p in paths if a in p.arcs]
        assert f.arc[a] == (min(through) if through else math.inf)
