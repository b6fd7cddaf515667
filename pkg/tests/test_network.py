from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import single_arc_network
from nfflow.errors import ConservationViolated
from nfflow.network import (
    Arc,
    ArcFlowSolution,
    Network,
    Path,
    SideSystem,
    decompose_flow,
    enumerate_paths,
    make_contrib,
    reverse_network,
    validate_network,
)
from nfflow.problems import build_csp_waste_limited


def two_chains():
    arcs = [
        Arc(0, "s", "a", 1, make_contrib({0: 1})),
        Arc(1, "a", "t", 0, ()),
        Arc(2, "s", "b", 1, make_contrib({0: 1})),
        Arc(3, "b", "t", 0, ()),
    ]
    return Network(["s", "a", "b", "t"], arcs, "s", "t")


def test_minimal_network_is_valid():
    net, sides = single_arc_network()
    assert validate_network(net, sides) == []


def test_arc_leaving_sink_is_reported():
    arcs = [Arc(0, "s", "t", 1, ()), Arc(1, "t", "s", 0, ())]
    net = Network(["s", "t"], arcs, "s", "t")
    diags = validate_network(net)
    assert "arc 1 leaves sink" in diags
    assert "arc 1 enters source" in diags


def test_cycle_is_reported():
    arcs = [
        Arc(0, "s", "a", 1, ()),
        Arc(1, "a", "b", 0, ()),
        Arc(2, "b", "a", 0, ()),
        Arc(3, "b", "t", 0, ()),
    ]
    net = Network(["s", "a", "b", "t"], arcs, "s", "t")
    assert net.topo is None
    assert "cycle detected" in validate_network(net)


def test_dangling_arc_and_bad_classification():
    arcs = [Arc(0, "s", "t", 1, make_contrib({0: -1})), Arc(1, "s", "x", 0, ())]
    net = Network(["s", "t"], arcs, "s", "t")
    diags = validate_network(net, SideSystem((1,), ("covering",)))
    assert any("dangling" in d for d in diags)
    assert any("classified covering" in d for d in diags)


def test_path_cost_and_column_are_sums(e1_net):
    net, _ = e1_net
    for p in enumerate_paths(net):
        assert p.cost == sum(net.arcs[a].cost for a in p.arcs)
        col = {}
        for a in p.arcs:
            for k, c in net.arcs[a].contrib:
                col[k] = col.get(k, 0) + c
        assert dict(p.column) == col


def test_path_must_chain():
    net = two_chains()
    with pytest.raises(ValueError):
        Path.from_arcs(net, [0, 3])


def test_decompose_single_arc():
    net, _ = single_arc_network()
    out = decompose_flow(net, ArcFlowSolution({0: 2}, 2))
    assert [(p.arcs, k) for p, k in out] == [((0,), 2)]


def test_decompose_zero_flow():
    net, _ = single_arc_network()
    assert decompose_flow(net, ArcFlowSolution({}, 0)) == []


def test_decompose_parallel_halves():
    net = two_chains()
    half = Fraction(1, 2)
    sol = ArcFlowSolution({a: half for a in range(4)}, 1)
    out = decompose_flow(net, sol)
    assert [(p.arcs, k) for p, k in out] == [((0, 1), half), ((2, 3), half)]
    assert ArcFlowSolution.from_paths(out).flow == sol.flow


def test_decompose_rejects_imbalance():
    net = two_chains()
    with pytest.raises(ConservationViolated):
        decompose_flow(net, ArcFlowSolution({0: 1, 3: 1}, 1))


def test_reverse_chain_keeps_ids():
    arcs = [Arc(0, "s", "a", 1, ()), Arc(1, "a", "t", 0, ())]
    net = Network(["s", "a", "t"], arcs, "s", "t")
    rev = reverse_network(net)
    assert rev.source == "t" and rev.sink == "s"
    assert [(a.id, a.tail, a.head) for a in rev.arcs] == [(0, "a", "s"), (1, "t", "a")]
    assert rev.topo == ("t", "a", "s")
    assert reverse_network(rev) == net


def test_reverse_waste_limited_keeps_arc_count(e1):
    net, _ = build_csp_waste_limited(e1, 2)
    assert len(reverse_network(net).arcs) == len(net.arcs)


def test_dump_format(toy_net):
    net, _ = toy_net
    lines = net.dump().splitlines()
    assert lines[0] == "arc 0 (1,0) (2,6) 0 {0:1}"
    assert lines[2] == "arc 2 (1,0) sink 1 {0:1}"
    net.kill([1])
    assert all(not line.startswith("arc 1 ") for line in net.dump().splitlines())


def test_kill_reports_only_new_arcs(e1_net):
    net, _ = e1_net
    assert net.kill([0, 1]) == {0, 1}
    assert net.kill([1, 2]) == {2}
    assert net.num_live == len(net.arcs) - 3
    copy = net.copy()
    copy.kill([3])
    assert 3 not in net.dead


@st.composite
def layered_flows(draw):
    """Random integer path flows on a random layered network."""
    layers = draw(st.integers(1, 3))
    width = draw(st.integers(1, 3))
    nodes = ["s"] + [(i, j) for i in range(layers) for j in range(width)] + ["t"]
    arcs = []

    def add(u, v):
        arcs.append(Arc(len(arcs), u, v, draw(st.integers(0, 3)), ()))

    for j in range(width):
        add("s", (0, j))
        add((layers - 1, j), "t")
    for i in range(layers - 1):
        for j in range(width):
            for k in range(width):
                if draw(st.booleans()):
                    add((i, j), (i + 1, k))
    net = Network(nodes, arcs, "s", "t")
    paths = enumerate_paths(net)
    mults = draw(st.lists(st.integers(0, 3), min_size=len(paths), max_size=len(paths)))
    return net, [(p, k) for p, k in zip(paths, mults) if k]


@settings(max_examples=60, deadline=None)
@given(layered_flows())
def test_decomposition_reaggregates_exactly(case):
    net, paths = case
    sol = ArcFlowSolution.from_paths(paths)
    out = decompose_flow(net, sol)
    back = ArcFlowSolution.from_paths(out)
    assert {a: v for a, v in back.flow.items() if v} == {a: v for a, v in sol.flow.items() if v}
    assert back.total == sol.total
    assert len(out) <= len(net.arcs)
    assert sum(k * p.cost for p, k in out) == sol.objective(net)
