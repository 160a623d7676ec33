"""Mesh topology model, random-geometric generation, and path utilities.

A mesh is an undirected geometric graph: routers with (x, y) positions and a
small set of radio channels, links between routers within transmission range,
and a non-empty set of gateway nodes that terminate routes.  Every link
carries scalar QoS weights (cost, bandwidth, delay, jitter, loss probability)
plus a normalized interference factor derived from channel separation against
its neighboring links.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import networkx as nx
import numpy as np

# Normalized interference vs channel separation for 2.4 GHz partially
# overlapping channels: co-channel is worst, >= 5 apart is orthogonal.
DEFAULT_IFACTOR_TABLE = (1.0, 0.7, 0.4, 0.2, 0.1)

NUM_CHANNELS = 11

UNREACHABLE = math.inf


class TopologyError(ValueError):
    """Invalid topology parameters or malformed topology data."""


class PathExplosionError(RuntimeError):
    """Simple-path enumeration exceeded its configured cap."""


def interference_factor(channel_separation: int,
                        table: tuple[float, ...] = DEFAULT_IFACTOR_TABLE) -> float:
    """Normalized interference between two links ``channel_separation`` apart.

    Non-increasing in separation: 1.0 for co-channel, 0.0 once the
    separation reaches orthogonality (beyond the end of ``table``).
    """
    if channel_separation < 0:
        raise ValueError("channel separation must be non-negative")
    if channel_separation >= len(table):
        return 0.0
    return table[channel_separation]


@dataclass(frozen=True)
class Node:
    id: int
    x: float
    y: float
    radios: tuple[int, ...]

    def __post_init__(self):
        if not self.radios:
            raise TopologyError(f"node {self.id} has no radios")
        if any(c < 1 or c > NUM_CHANNELS for c in self.radios):
            raise TopologyError(f"node {self.id} has channels outside 1..{NUM_CHANNELS}")


@dataclass(frozen=True)
class Link:
    u: int
    v: int
    channel: int
    cost: float
    bandwidth: float
    delay: float
    jitter: float
    loss_prob: float
    i_factor: float = 0.0
    synthetic: bool = False

    def __post_init__(self):
        if self.u == self.v:
            raise TopologyError("self-loop link")
        if self.cost <= 0 or self.bandwidth <= 0:
            raise TopologyError("cost and bandwidth must be positive")
        if self.delay < 0 or self.jitter < 0:
            raise TopologyError("delay and jitter must be non-negative")
        if not 0.0 <= self.loss_prob <= 1.0:
            raise TopologyError("loss_prob outside [0, 1]")
        if not 0.0 <= self.i_factor <= 1.0:
            raise TopologyError("i_factor outside [0, 1]")

    @property
    def key(self) -> tuple[int, int]:
        return (self.u, self.v) if self.u < self.v else (self.v, self.u)


@dataclass(frozen=True)
class TopologyParams:
    """Knobs for the random-geometric generator.

    The default area is a square sized so the expected node degree stays
    around 4-6 at the default 250 m range: 1000x1000 m at 25 nodes, with the
    side scaled by sqrt(node_count / 25).
    """
    node_count: int
    area: tuple[float, float] | None = None
    transmission_range: float = 250.0
    cost_range: tuple[float, float] = (2.0, 10.0)
    bandwidth: float = 11.0
    delay_range: tuple[float, float] = (0.5, 2.0)
    jitter_range: tuple[float, float] = (0.5, 2.0)
    loss_range: tuple[float, float] = (0.001, 0.10)
    gateway_count: int = 3
    radios_per_node: int = 2
    ifactor_table: tuple[float, ...] = DEFAULT_IFACTOR_TABLE
    rng_seed: int = 0

    def __post_init__(self):
        if self.node_count < 2:
            raise TopologyError("node_count must be >= 2")
        if not 1 <= self.gateway_count < self.node_count:
            raise TopologyError("gateway_count must be in [1, node_count)")
        for lo, hi in (self.cost_range, self.delay_range,
                       self.jitter_range, self.loss_range):
            if lo > hi:
                raise TopologyError("range lower bound exceeds upper bound")
        if self.area is not None and (self.area[0] <= 0 or self.area[1] <= 0):
            raise TopologyError("degenerate area")

    def resolved_area(self) -> tuple[float, float]:
        if self.area is not None:
            return self.area
        side = 1000.0 * math.sqrt(self.node_count / 25.0)
        return (side, side)


class MeshTopology:
    """Immutable weighted mesh graph with gateways.

    Construction validates symmetry, connectivity of declared links, and the
    gateway set; the instance is then safe to share across threads.
    """

    def __init__(self, nodes: list[Node], links: list[Link],
                 gateways: set[int], transmission_range: float):
        self.nodes: tuple[Node, ...] = tuple(sorted(nodes, key=lambda n: n.id))
        if [n.id for n in self.nodes] != list(range(len(self.nodes))):
            raise TopologyError("node ids must be dense from 0")
        self._links: dict[tuple[int, int], Link] = {}
        for link in links:
            if link.u >= len(self.nodes) or link.v >= len(self.nodes):
                raise TopologyError(f"link {link.u}-{link.v} references unknown node")
            if link.key in self._links:
                raise TopologyError(f"duplicate link {link.key}")
            self._links[link.key] = link
        self.gateways: frozenset[int] = frozenset(gateways)
        if not self.gateways:
            raise TopologyError("gateway set is empty")
        if not self.gateways <= {n.id for n in self.nodes}:
            raise TopologyError("gateways must be topology nodes")
        self.transmission_range = float(transmission_range)
        self._adj: dict[int, frozenset[int]] = {}
        adj: dict[int, set[int]] = {n.id: set() for n in self.nodes}
        for (u, v) in self._links:
            adj[u].add(v)
            adj[v].add(u)
        self._adj = {k: frozenset(s) for k, s in adj.items()}

    # -- basic accessors ---------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def links(self) -> tuple[Link, ...]:
        return tuple(self._links[k] for k in sorted(self._links))

    def link(self, u: int, v: int) -> Link | None:
        return self._links.get((u, v) if u < v else (v, u))

    def neighbors(self, u: int) -> frozenset[int]:
        return self._adj[u]

    def has_node(self, u: int) -> bool:
        return 0 <= u < len(self.nodes)

    @cached_property
    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(n.id for n in self.nodes)
        for (u, v), link in self._links.items():
            g.add_edge(u, v, weight=link.cost)
        return g

    @cached_property
    def max_link_cost(self) -> float:
        return max((l.cost for l in self._links.values()), default=0.0)

    def is_connected(self) -> bool:
        return nx.is_connected(self.graph)

    # -- shortest paths ----------------------------------------------------

    def _source_dijkstra(self, source: int) -> tuple[dict, dict]:
        cache = self.__dict__.setdefault("_dijkstra_cache", {})
        if source not in cache:
            costs, paths = nx.single_source_dijkstra(self.graph, source)
            cache[source] = (costs, paths)
        return cache[source]

    def shortest_path_cost(self, source: int, target: int) -> float:
        """Minimal sum of link costs, or the UNREACHABLE marker (inf)."""
        if not (self.has_node(source) and self.has_node(target)):
            raise TopologyError("unknown node id")
        costs, _ = self._source_dijkstra(source)
        return costs.get(target, UNREACHABLE)

    def shortest_path(self, source: int, target: int) -> list[int] | None:
        if not (self.has_node(source) and self.has_node(target)):
            raise TopologyError("unknown node id")
        _, paths = self._source_dijkstra(source)
        return paths.get(target)

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "range": self.transmission_range,
            "gateways": sorted(self.gateways),
            "nodes": [
                {"id": n.id, "x": n.x, "y": n.y, "radios": list(n.radios)}
                for n in self.nodes
            ],
            "links": [
                {
                    "u": l.u, "v": l.v, "channel": l.channel, "cost": l.cost,
                    "bandwidth": l.bandwidth, "delay": l.delay,
                    "jitter": l.jitter, "loss": l.loss_prob,
                    "ifactor": l.i_factor, "synthetic": l.synthetic,
                }
                for l in self.links
            ],
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict) -> "MeshTopology":
        try:
            nodes = [Node(d["id"], d["x"], d["y"], tuple(d["radios"]))
                     for d in data["nodes"]]
            links = [Link(d["u"], d["v"], d["channel"], d["cost"],
                          d["bandwidth"], d["delay"], d["jitter"], d["loss"],
                          d.get("ifactor", 0.0), d.get("synthetic", False))
                     for d in data["links"]]
            return cls(nodes, links, set(data["gateways"]), data["range"])
        except (KeyError, TypeError) as exc:
            raise TopologyError(f"malformed topology document: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "MeshTopology":
        return cls.from_dict(json.loads(text))


# -- validation and enumeration -------------------------------------------

def validate_path(topo: MeshTopology, path: list[int],
                  require_gateway: bool = True) -> bool:
    """True iff ``path`` is a non-empty simple walk along existing links.

    With ``require_gateway`` the last node must additionally be a gateway.
    Never raises: malformed input simply yields False.
    """
    if not path:
        return False
    if any(not isinstance(u, (int, np.integer)) or not topo.has_node(u)
           for u in path):
        return False
    if len(set(path)) != len(path):
        return False
    for u, v in zip(path, path[1:]):
        if v not in topo.neighbors(u):
            return False
    if require_gateway and path[-1] not in topo.gateways:
        return False
    return True


def enumerate_simple_paths(topo: MeshTopology, source: int,
                           destinations: set[int], max_hops: int,
                           cap: int = 500_000) -> list[list[int]]:
    """Every simple path from ``source`` ending at any destination.

    Destinations are absorbing: a path stops at the first destination it
    reaches (a route terminates at its egress), so no returned path crosses
    one destination on the way to another.  Paths have at most ``max_hops``
    links, returned in lexicographic order by node sequence; the zero-link
    path [source] is included when the source is itself a destination.
    Raises PathExplosionError past ``cap`` paths.
    """
    if not topo.has_node(source):
        raise TopologyError("unknown source node")
    if not destinations:
        raise TopologyError("destinations must be non-empty")
    if max_hops < 1:
        raise TopologyError("max_hops must be >= 1")

    out: list[list[int]] = []
    stack = [source]
    on_path = {source}

    def visit():
        if stack[-1] in destinations:
            out.append(list(stack))
            if len(out) > cap:
                raise PathExplosionError(
                    f"simple-path enumeration exceeded cap of {cap} paths")
            return
        if len(stack) - 1 >= max_hops:
            return
        for nxt in sorted(topo.neighbors(stack[-1])):
            if nxt in on_path:
                continue
            stack.append(nxt)
            on_path.add(nxt)
            visit()
            on_path.discard(stack.pop())

    visit()
    return out


# -- generation ------------------------------------------------------------

def _pick_gateways(positions: np.ndarray, count: int,
                   rng: np.random.Generator) -> list[int]:
    # Spread gateways over the deployment via a short k-means on node
    # positions; each gateway is the node nearest a cluster center.
    n = len(positions)
    centers = positions[rng.choice(n, size=count, replace=False)].copy()
    for _ in range(12):
        d2 = ((positions[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        assign = d2.argmin(axis=1)
        for k in range(count):
            members = positions[assign == k]
            if len(members):
                centers[k] = members.mean(axis=0)
    chosen: list[int] = []
    for k in range(count):
        order = np.argsort(((positions - centers[k]) ** 2).sum(axis=1))
        for idx in order:
            if int(idx) not in chosen:
                chosen.append(int(idx))
                break
    return sorted(chosen)


def generate_topology(params: TopologyParams) -> MeshTopology:
    """Random-geometric mesh matching ``params``; pure function of the seed.

    Nodes are placed uniformly over the area; every pair within transmission
    range gets a link with weights drawn uniformly from the configured
    ranges.  Disconnected components are stitched by linking nearest
    inter-component node pairs (flagged synthetic, exempt from the range
    constraint).  Per-link interference is the worst channel overlap against
    any link sharing an endpoint.
    """
    rng = np.random.default_rng(params.rng_seed)
    width, height = params.resolved_area()
    n = params.node_count

    xs = rng.uniform(0.0, width, size=n)
    ys = rng.uniform(0.0, height, size=n)
    radios = [tuple(sorted(int(c) for c in
                           rng.choice(np.arange(1, NUM_CHANNELS + 1),
                                      size=min(params.radios_per_node, NUM_CHANNELS),
                                      replace=False)))
              for _ in range(n)]
    nodes = [Node(i, float(xs[i]), float(ys[i]), radios[i]) for i in range(n)]

    def draw_link(u: int, v: int, synthetic: bool) -> Link:
        shared = set(radios[u]) & set(radios[v])
        pool = sorted(shared) if shared else sorted(set(radios[u]) | set(radios[v]))
        channel = int(rng.choice(pool))
        return Link(
            u, v, channel,
            cost=float(rng.uniform(*params.cost_range)),
            bandwidth=params.bandwidth,
            delay=float(rng.uniform(*params.delay_range)),
            jitter=float(rng.uniform(*params.jitter_range)),
            loss_prob=float(rng.uniform(*params.loss_range)),
            synthetic=synthetic,
        )

    links: dict[tuple[int, int], Link] = {}
    positions = np.stack([xs, ys], axis=1)
    for u in range(n):
        for v in range(u + 1, n):
            if math.dist(positions[u], positions[v]) <= params.transmission_range:
                links[(u, v)] = draw_link(u, v, synthetic=False)

    # Stitch components with nearest inter-component pairs until connected.
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(links)
    while not nx.is_connected(g):
        comps = [sorted(c) for c in nx.connected_components(g)]
        comps.sort()
        best = None
        base = comps[0]
        for other in comps[1:]:
            for u in base:
                for v in other:
                    d = math.dist(positions[u], positions[v])
                    if best is None or d < best[0]:
                        best = (d, min(u, v), max(u, v))
        _, u, v = best
        links[(u, v)] = draw_link(u, v, synthetic=True)
        g.add_edge(u, v)

    # Worst-case overlap with any link sharing an endpoint.
    incident: dict[int, list[tuple[int, int]]] = {i: [] for i in range(n)}
    for key in links:
        incident[key[0]].append(key)
        incident[key[1]].append(key)
    finished: list[Link] = []
    for key, link in links.items():
        worst = 0.0
        for endpoint in key:
            for other_key in incident[endpoint]:
                if other_key == key:
                    continue
                sep = abs(link.channel - links[other_key].channel)
                worst = max(worst, interference_factor(sep, params.ifactor_table))
        finished.append(replace(link, i_factor=worst))

    gateways = _pick_gateways(positions, params.gateway_count, rng)
    return MeshTopology(nodes, finished, set(gateways),
                        params.transmission_range)
