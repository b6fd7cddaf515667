import pytest

from nfflow.network import Arc, Network, SideSystem, make_contrib
from nfflow.problems import CspInstance, OoebppInstance, build_csp_standard, build_ooebpp


@pytest.fixture
def e1():
    return CspInstance(6, ((4, 1), (3, 2)))


@pytest.fixture
def e2():
    return CspInstance(10, ((5, 2), (4, 1), (3, 1)))


@pytest.fixture
def toy():
    return OoebppInstance(10, (6, 5, 9))


@pytest.fixture
def e1_net(e1):
    return build_csp_standard(e1)


@pytest.fixture
def toy_net(toy):
    return build_ooebpp(toy)


def arc_between(net, tail, head, waste=False):
    """Id of the (item or waste) arc from ``tail`` to ``head``."""
    for a in net.arcs:
        if a.tail == tail and a.head == head and (a.group == "waste") == waste:
            return a.id
    raise KeyError((tail, head, waste))


def single_arc_network(cost=1, rhs=1):
    net = Network(["s", "t"], [Arc(0, "s", "t", cost, make_contrib({0: 1}))], "s", "t")
    return net, SideSystem.from_network(net, [rhs])


def random_small_network(rng, max_nodes=6, rows=2):
    """Seeded random DAG on nodes ``0..n-1`` with covering side rows.

    Every node lies on a source-sink chain so the model is feasible.
    """
    n = int(rng.integers(3, max_nodes + 1))
    pairs = {(i, i + 1) for i in range(n - 1)}
    for i in range(n):
        for j in range(i + 2, n):
            if rng.random() < 0.45:
                pairs.add((i, j))
    arcs = []
    for t, h in sorted(pairs):
        contrib = {k: 1 for k in range(rows) if rng.random() < 0.4}
        arcs.append(Arc(len(arcs), t, h, 1 if t == 0 else 0, make_contrib(contrib)))
    net = Network(list(range(n)), arcs, 0, n - 1)
    rhs = []
    for k in range(rows):
        rhs.append(1 if any(k in dict(a.contrib) for a in arcs) else 0)
    return net, SideSystem.from_network(net, rhs)
