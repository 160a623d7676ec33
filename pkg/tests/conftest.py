import pytest

from meshroute import Link, MeshTopology, Node


LINK_DEFAULTS = dict(channel=1, cost=2.0, bandwidth=11.0, delay=1.0,
                     jitter=0.5, loss_prob=0.01, i_factor=0.0)


def make_topo(n, edges, gateways, transmission_range=10_000.0):
    """Hand-built mesh: n nodes on a line, links from an {(u, v): overrides}
    mapping with LINK_DEFAULTS filled in."""
    nodes = [Node(i, 10.0 * i, 0.0, (1, 6)) for i in range(n)]
    links = []
    for (u, v), overrides in edges.items():
        attrs = {**LINK_DEFAULTS, **overrides}
        links.append(Link(u, v, **attrs))
    return MeshTopology(nodes, links, set(gateways), transmission_range)


def source_for(topo):
    """First node that is not a gateway."""
    return next(i for i in range(topo.node_count) if i not in topo.gateways)


@pytest.fixture
def triangle():
    # s=0, a=1, t=2; direct s-t plus a detour through a.
    return make_topo(3, {
        (0, 1): {"cost": 4.0},
        (0, 2): {"cost": 5.0},
        (1, 2): {"cost": 4.0},
    }, gateways={2})


@pytest.fixture
def line3():
    # a-b-c with costs 2 and 3.
    return make_topo(3, {
        (0, 1): {"cost": 2.0},
        (1, 2): {"cost": 3.0},
    }, gateways={2})


def merge_demo_topo():
    """14-node mesh used by the position-merge and crossover walkthroughs:
    routes 1-2-4-9-13 and 1-7-5-10-13, with source costs ordering 7 below 2,
    5 below 4, and 9 below 10.  Gateway is node 13."""
    edges = {
        (1, 2): {"cost": 6.0},
        (1, 7): {"cost": 3.0},
        (2, 4): {"cost": 3.0},
        (7, 5): {"cost": 2.0},
        (5, 9): {"cost": 3.0},
        (5, 10): {"cost": 4.0},
        (4, 9): {"cost": 8.0},
        (9, 13): {"cost": 2.0},
        (10, 13): {"cost": 2.0},
    }
    return make_topo(14, edges, gateways={13})
