"""Discrete route solvers: hybrid PSO-GA plus pure-PSO and pure-GA baselines.

A particle is a loop-free node sequence from the source to some gateway.
Because node sequences admit no vector arithmetic, the swarm update combines
a particle with its personal best and the global best position-by-position,
keeping at each position whichever node is cheaper to reach from the source;
the GA side recombines particles with a positional two-point crossover.
Broken sequences produced by either operator are repaired by stitching
minimum-cost subpaths.
"""

from __future__ import annotations

import heapq
import json
import math
import random
import time
from dataclasses import dataclass, field

from .qos import FitnessBreakdown, PenaltyCoeffs, QosRequest, fitness
from .topology import MeshTopology, validate_path


class UnreachableGatewayError(RuntimeError):
    """No gateway can be reached from the requested source."""


@dataclass
class HybridConfig:
    swarm_size: int = 30
    max_iterations: int = 100
    c1: float = 1.5
    c2: float = 1.5
    breed_ratio: float = 0.5
    mutation_rate: float = 0.05
    stagnation_window: int = 15
    elite_fraction: float = 0.1
    rng_seed: int = 0
    algorithm: str = "hybrid"

    def __post_init__(self):
        if self.swarm_size < 2:
            raise ValueError("swarm_size must be >= 2")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not (0.0 <= self.c1 <= 2.0 and 0.0 <= self.c2 <= 2.0):
            raise ValueError("c1 and c2 must lie in [0, 2]")
        if not 0.0 <= self.breed_ratio <= 1.0:
            raise ValueError("breed_ratio outside [0, 1]")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate outside [0, 1]")
        if self.algorithm not in ("pso", "ga", "hybrid"):
            raise ValueError("algorithm must be pso, ga or hybrid")


@dataclass
class Particle:
    path: list[int]
    fitness: FitnessBreakdown | None = None
    pbest_path: list[int] = field(default_factory=list)
    pbest_fitness: FitnessBreakdown | None = None


@dataclass
class RunResult:
    best_path: list[int]
    best_fitness: FitnessBreakdown
    fitness_trace: list[float]
    incumbent_paths: list[list[int]]
    iterations_executed: int
    iterations_to_best: int
    wall_time_ms: float
    time_to_best_ms: float
    seed: int
    algorithm: str
    iteration_times_ms: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "best_path": list(self.best_path),
            "best_fitness": self.best_fitness.to_dict(),
            "fitness_trace": list(self.fitness_trace),
            "incumbent_paths": [list(p) for p in self.incumbent_paths],
            "iterations_executed": self.iterations_executed,
            "iterations_to_best": self.iterations_to_best,
            "wall_time_ms": self.wall_time_ms,
            "time_to_best_ms": self.time_to_best_ms,
            "seed": self.seed,
            "algorithm": self.algorithm,
            "iteration_times_ms": list(self.iteration_times_ms),
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), indent=indent)


class RouteContext:
    """Per-run bundle of topology, endpoints, QoS demand, and caches.

    Shortest-path results from any node are memoized, so alter() lookups and
    repair stitching stay cheap across thousands of operator applications.
    """

    def __init__(self, topo: MeshTopology, source: int,
                 req: QosRequest, coeffs: PenaltyCoeffs,
                 gateways: set[int] | None = None):
        if not topo.has_node(source):
            raise ValueError("unknown source node")
        self.topo = topo
        self.source = source
        self.req = req
        self.coeffs = coeffs
        self.gateways = frozenset(gateways if gateways is not None else topo.gateways)
        if not self.gateways:
            raise ValueError("empty gateway set")

    def cost_from_source(self, node: int) -> float:
        return self.topo.shortest_path_cost(self.source, node)

    def min_cost_path(self, u: int, v: int) -> list[int] | None:
        return self.topo.shortest_path(u, v)

    def nearest_gateway_path(self, node: int) -> list[int] | None:
        best = None
        for g in sorted(self.gateways):
            cost = self.topo.shortest_path_cost(node, g)
            if cost != math.inf and (best is None or cost < best[0]):
                best = (cost, g)
        if best is None:
            return None
        return self.topo.shortest_path(node, best[1])

    def fitness(self, path: list[int]) -> FitnessBreakdown:
        return fitness(self.topo, path, self.req, self.coeffs)


# -- path surgery ----------------------------------------------------------

def remove_loops(seq: list[int]) -> list[int]:
    """Cut every loop by excising between the first and last occurrence of a
    repeated node, until the sequence is simple."""
    out = list(seq)
    while True:
        first: dict[int, int] = {}
        dup = None
        for idx, node in enumerate(out):
            if node in first:
                dup = node
            else:
                first[node] = idx
        if dup is None:
            return out
        lo = first[dup]
        hi = len(out) - 1 - out[::-1].index(dup)
        out = out[: lo + 1] + out[hi + 1:]


def repair_path(raw: list[int], ctx: RouteContext) -> list[int] | None:
    """Turn an arbitrary node sequence into a valid source->gateway path.

    Non-adjacent consecutive pairs are bridged with the min-cost subpath,
    loops excised, and a min-cost suffix appended when the sequence does not
    end at a gateway.  Returns None when no valid path can be built.
    """
    if not raw or raw[0] != ctx.source:
        return None
    if any(not ctx.topo.has_node(u) for u in raw):
        return None
    stitched = [raw[0]]
    for v in raw[1:]:
        u = stitched[-1]
        if v == u:
            continue
        if v in ctx.topo.neighbors(u):
            stitched.append(v)
        else:
            sub = ctx.min_cost_path(u, v)
            if sub is None:
                return None
            stitched.extend(sub[1:])
    seq = remove_loops(stitched)
    seq = _truncate_at_gateway(seq, ctx.gateways)
    if seq[-1] not in ctx.gateways:
        suffix = ctx.nearest_gateway_path(seq[-1])
        if suffix is None:
            return None
        seq = _truncate_at_gateway(remove_loops(seq + suffix[1:]),
                                   ctx.gateways)
    if seq[0] == ctx.source and validate_path(ctx.topo, seq):
        return seq
    return None


def _truncate_at_gateway(seq: list[int], gateways: frozenset[int]) -> list[int]:
    # Routes terminate at their first gateway; stitching may have crossed one.
    for i, node in enumerate(seq[1:], start=1):
        if node in gateways:
            return seq[: i + 1]
    return seq


def _restricted_min_path(topo: MeshTopology, start: int, goal: int,
                         forbidden: set[int]) -> list[int] | None:
    # Dijkstra that refuses to enter `forbidden` nodes.
    dist = {start: 0.0}
    prev: dict[int, int] = {}
    heap = [(0.0, start)]
    while heap:
        d, u = heapq.heappop(heap)
        if u == goal:
            path = [goal]
            while path[-1] != start:
                path.append(prev[path[-1]])
            return path[::-1]
        if d > dist.get(u, math.inf):
            continue
        for v in sorted(topo.neighbors(u)):
            if v in forbidden and v != goal:
                continue
            nd = d + topo.link(u, v).cost
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                prev[v] = u
                heapq.heappush(heap, (nd, v))
    return None


# -- swarm operators -------------------------------------------------------

def random_walk_path(ctx: RouteContext, rng: random.Random,
                     max_restarts: int = 50) -> list[int]:
    """Loop-free random walk from the source to any gateway.

    Restarts after dead ends or a node-count hop cap; falls back to the
    min-cost path to the nearest gateway once restarts are exhausted.
    """
    topo = ctx.topo
    for _ in range(max_restarts):
        path = [ctx.source]
        visited = {ctx.source}
        while len(path) <= topo.node_count:
            options = [v for v in sorted(topo.neighbors(path[-1]))
                       if v not in visited]
            if not options:
                break
            nxt = rng.choice(options)
            path.append(nxt)
            visited.add(nxt)
            if nxt in ctx.gateways:
                return path
    fallback = ctx.nearest_gateway_path(ctx.source)
    if fallback is None or len(fallback) < 2:
        raise UnreachableGatewayError(
            f"no gateway reachable from node {ctx.source}")
    return fallback


def init_swarm(ctx: RouteContext, config: HybridConfig,
               rng: random.Random) -> list[Particle]:
    """N loop-free random-walk particles from source to any gateway."""
    greedy = ctx.nearest_gateway_path(ctx.source)
    if greedy is None or len(greedy) < 2:
        raise UnreachableGatewayError(
            f"no gateway reachable from node {ctx.source}")
    paths = [random_walk_path(ctx, rng) for _ in range(config.swarm_size)]
    swarm = []
    for p in paths:
        fit = ctx.fitness(p)
        swarm.append(Particle(path=p, fitness=fit,
                              pbest_path=list(p), pbest_fitness=fit))
    return swarm


def alter(a: int, b: int, ctx: RouteContext) -> int:
    """Keep whichever node is cheaper to reach from the source; ties keep
    the first argument."""
    if ctx.cost_from_source(b) < ctx.cost_from_source(a):
        return b
    return a


def combine_paths(current: list[int], other: list[int], ctx: RouteContext,
                  replace_prob: float = 1.0,
                  rng: random.Random | None = None) -> list[int]:
    """Position-wise merge of two routes, the discrete stand-in for adding a
    scaled attraction term.

    Interior positions (aligned up to the shorter route, endpoints pinned)
    are each replaced, with probability ``replace_prob``, by the cheaper of
    the two aligned nodes.  Loops created by replacements are excised.
    """
    out = list(current)
    limit = min(len(current), len(other)) - 1
    for k in range(1, limit):
        if replace_prob >= 1.0 or (rng is not None and rng.random() < replace_prob):
            out[k] = alter(out[k], other[k], ctx)
    return remove_loops(out)


def oplus_update(particle: Particle, gbest_path: list[int], ctx: RouteContext,
                 config: HybridConfig, rng: random.Random) -> list[int]:
    """PSO-style position update in the path domain.

    Two merge stages (toward pbest then gbest); each stage's replacement
    probability is min(1, c * r) with fresh r ~ U(0,1), so c1/c2 act as
    attraction strengths.  The merged sequence is repaired; on repair
    failure the particle keeps its previous route.
    """
    p1 = min(1.0, config.c1 * rng.random())
    step = combine_paths(particle.path, particle.pbest_path, ctx, p1, rng)
    p2 = min(1.0, config.c2 * rng.random())
    step = combine_paths(step, gbest_path, ctx, p2, rng)
    repaired = repair_path(step, ctx)
    return repaired if repaired is not None else list(particle.path)


def crossover_children(p1: list[int], p2: list[int],
                       cuts: tuple[tuple[int, int], tuple[int, int]],
                       ) -> tuple[list[int], list[int]]:
    """Raw (pre-repair) positional two-point crossover.

    ``cuts`` gives each child its own window on its base parent; the window
    is replaced by the other parent's same-index segment, endpoints pinned.
    """
    (a1, b1), (a2, b2) = cuts
    child1 = p1[:a1] + p2[a1:b1] + p1[b1:]
    child2 = p2[:a2] + p1[a2:b2] + p2[b2:]
    return child1, child2


def draw_cuts(base: list[int], other: list[int],
              rng: random.Random) -> tuple[int, int]:
    # Window start must leave a non-empty same-index segment in `other`.
    hi = min(len(base) - 1, len(other) - 1)
    a = rng.randrange(1, hi)
    b = rng.randrange(a, len(base))
    return a, b


def two_point_crossover(p1: list[int], p2: list[int], ctx: RouteContext,
                        rng: random.Random) -> tuple[list[int], list[int]]:
    """Crossover with randomly drawn windows plus repair.

    Parents shorter than 3 nodes pass through unchanged; a child whose
    repair fails falls back to its base parent.
    """
    if len(p1) < 3 or len(p2) < 3:
        return list(p1), list(p2)
    cuts = (draw_cuts(p1, p2, rng), draw_cuts(p2, p1, rng))
    raw1, raw2 = crossover_children(p1, p2, cuts)
    child1 = repair_path(remove_loops(raw1), ctx)
    child2 = repair_path(remove_loops(raw2), ctx)
    return (child1 if child1 is not None else list(p1),
            child2 if child2 is not None else list(p2))


def mutate(path: list[int], ctx: RouteContext, rng: random.Random,
           mutation_rate: float) -> list[int]:
    """With probability ``mutation_rate``, drop one interior node and bridge
    the gap with the cheapest detour that avoids it; no detour, no change."""
    if len(path) < 3 or rng.random() >= mutation_rate:
        return list(path)
    k = rng.randrange(1, len(path) - 1)
    removed = path[k]
    forbidden = (set(path) | set(ctx.gateways)) - {path[k - 1], path[k + 1]}
    detour = _restricted_min_path(ctx.topo, path[k - 1], path[k + 1], forbidden)
    if detour is None:
        return list(path)
    candidate = path[:k - 1] + detour + path[k + 2:]
    if removed in candidate or not validate_path(ctx.topo, candidate):
        return list(path)
    return candidate


def dedupe(swarm: list[Particle], ctx: RouteContext,
           rng: random.Random) -> list[Particle]:
    """Replace duplicate routes (beyond the first) with fresh random walks,
    resetting the replacement's personal best; swarm size is preserved."""
    seen: set[tuple[int, ...]] = set()
    out = []
    for particle in swarm:
        key = tuple(particle.path)
        if key in seen:
            fresh = random_walk_path(ctx, rng)
            for _ in range(20):
                if tuple(fresh) not in seen:
                    break
                fresh = random_walk_path(ctx, rng)
            fit = ctx.fitness(fresh)
            out.append(Particle(path=fresh, fitness=fit,
                                pbest_path=list(fresh), pbest_fitness=fit))
            seen.add(tuple(fresh))
        else:
            seen.add(key)
            out.append(particle)
    return out


def elitism_split(swarm: list[Particle], config: HybridConfig,
                  rng: random.Random,
                  gbest: Particle | None = None,
                  ) -> tuple[list[Particle], list[Particle], list[Particle]]:
    """Partition the swarm into (elite, pso_set, ga_set).

    The elite are the top ceil(elite_fraction * N) by fitness, carried over
    unchanged (with the incumbent global best forced in); of the rest,
    Z = round(count * breed_ratio) particles chosen uniformly at random take
    the PSO update, the remainder go to crossover.
    """
    n_elite = math.ceil(config.elite_fraction * len(swarm))
    ranked = sorted(swarm, key=lambda p: (p.fitness.total, p.path))
    elite = ranked[:n_elite]
    rest = ranked[n_elite:]
    if gbest is not None and all(e.path != gbest.path for e in elite) and elite:
        elite = elite[:-1] + [gbest]
    z = round(len(rest) * config.breed_ratio)
    pso_set = rng.sample(rest, z)
    pso_ids = {id(p) for p in pso_set}
    ga_set = [p for p in rest if id(p) not in pso_ids]
    return elite, pso_set, ga_set


def _tournament(pool: list[Particle], rng: random.Random) -> Particle:
    a, b = rng.choice(pool), rng.choice(pool)
    return a if a.fitness.total <= b.fitness.total else b


def _child(path: list[int], parent: Particle, ctx: RouteContext) -> Particle:
    return Particle(path=path, fitness=ctx.fitness(path),
                    pbest_path=list(parent.pbest_path),
                    pbest_fitness=parent.pbest_fitness)


def _ga_offspring(parents: list[Particle], pool: list[Particle],
                  ctx: RouteContext, config: HybridConfig,
                  rng: random.Random, tournament: bool) -> list[Particle]:
    """Crossover + mutation over `parents`; with `tournament` the mates come
    from `pool` by binary tournament, otherwise by random pairing."""
    out: list[Particle] = []
    if tournament:
        for _ in range(len(parents) // 2):
            pa, pb = _tournament(pool, rng), _tournament(pool, rng)
            c1, c2 = two_point_crossover(pa.path, pb.path, ctx, rng)
            out.append(_child(mutate(c1, ctx, rng, config.mutation_rate), pa, ctx))
            out.append(_child(mutate(c2, ctx, rng, config.mutation_rate), pb, ctx))
        if len(parents) % 2:
            pa = _tournament(pool, rng)
            out.append(_child(mutate(pa.path, ctx, rng, config.mutation_rate), pa, ctx))
        return out
    order = list(parents)
    rng.shuffle(order)
    for i in range(0, len(order) - 1, 2):
        pa, pb = order[i], order[i + 1]
        c1, c2 = two_point_crossover(pa.path, pb.path, ctx, rng)
        out.append(_child(mutate(c1, ctx, rng, config.mutation_rate), pa, ctx))
        out.append(_child(mutate(c2, ctx, rng, config.mutation_rate), pb, ctx))
    if len(order) % 2:
        pa = order[-1]
        out.append(_child(mutate(pa.path, ctx, rng, config.mutation_rate), pa, ctx))
    return out


# -- main loop -------------------------------------------------------------

def run(topo: MeshTopology, source: int, req: QosRequest,
        coeffs: PenaltyCoeffs, config: HybridConfig,
        gateways: set[int] | None = None) -> RunResult:
    """Solve for a QoS-satisfying min-fitness route.

    One iteration: evaluate, refresh personal/global bests, split off the
    elite, apply the PSO merge to one share of the rest and crossover plus
    mutation to the other (the `algorithm` field collapses this to a pure
    PSO or pure GA update), then discard duplicate routes.  Stops at the
    iteration cap or after `stagnation_window` iterations without
    improvement.  Deterministic for a fixed seed, wall time aside.
    """
    ctx = RouteContext(topo, source, req, coeffs, gateways)
    rng = random.Random(config.rng_seed)
    t0 = time.perf_counter()
    swarm = init_swarm(ctx, config, rng)

    gbest: Particle | None = None
    trace: list[float] = []
    incumbents: list[list[int]] = []
    iter_times: list[float] = []
    last_improve = 1
    time_to_best = 0.0
    iterations = 0

    for t in range(1, config.max_iterations + 1):
        iterations = t
        for p in swarm:
            if p.fitness is None:
                p.fitness = ctx.fitness(p.path)
            if p.pbest_fitness is None or p.fitness.total < p.pbest_fitness.total:
                p.pbest_fitness = p.fitness
                p.pbest_path = list(p.path)
        best_now = min(swarm, key=lambda p: (p.fitness.total, p.path))
        if gbest is None or best_now.fitness.total < gbest.fitness.total - 1e-12:
            gbest = Particle(path=list(best_now.path), fitness=best_now.fitness,
                             pbest_path=list(best_now.path),
                             pbest_fitness=best_now.fitness)
            last_improve = t
            time_to_best = (time.perf_counter() - t0) * 1000.0
        trace.append(gbest.fitness.total)
        incumbents.append(list(gbest.path))
        iter_times.append((time.perf_counter() - t0) * 1000.0)

        if t == config.max_iterations or t - last_improve >= config.stagnation_window:
            break

        elite, pso_set, ga_set = _split_for_algorithm(swarm, config, rng, gbest)
        next_gen = [Particle(path=list(e.path), fitness=e.fitness,
                             pbest_path=list(e.pbest_path),
                             pbest_fitness=e.pbest_fitness) for e in elite]
        for p in pso_set:
            new_path = oplus_update(p, gbest.path, ctx, config, rng)
            next_gen.append(_child(new_path, p, ctx))
        if ga_set:
            next_gen.extend(_ga_offspring(ga_set, ga_set, ctx, config, rng,
                                          tournament=(config.algorithm == "ga")))
        swarm = dedupe(next_gen, ctx, rng)

    wall = (time.perf_counter() - t0) * 1000.0
    return RunResult(
        best_path=list(gbest.path),
        best_fitness=gbest.fitness,
        fitness_trace=trace,
        incumbent_paths=incumbents,
        iterations_executed=iterations,
        iterations_to_best=last_improve,
        wall_time_ms=wall,
        time_to_best_ms=time_to_best,
        seed=config.rng_seed,
        algorithm=config.algorithm,
        iteration_times_ms=iter_times,
    )


def _split_for_algorithm(swarm, config, rng, gbest):
    if config.algorithm == "pso":
        forced = HybridConfig(**{**config.__dict__, "breed_ratio": 1.0})
        return elitism_split(swarm, forced, rng, gbest)
    if config.algorithm == "ga":
        forced = HybridConfig(**{**config.__dict__, "breed_ratio": 0.0})
        return elitism_split(swarm, forced, rng, gbest)
    return elitism_split(swarm, config, rng, gbest)
