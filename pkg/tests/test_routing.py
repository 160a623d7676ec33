import random

import pytest

from meshroute import (
    HybridConfig,
    PenaltyCoeffs,
    QosRequest,
    RouteContext,
    TopologyParams,
    UnreachableGatewayError,
    alter,
    combine_paths,
    crossover_children,
    dedupe,
    elitism_split,
    generate_topology,
    init_swarm,
    mutate,
    oplus_update,
    oracle_best,
    repair_path,
    run,
    two_point_crossover,
    validate_path,
)
from meshroute.routing import Particle, remove_loops

from conftest import make_topo, merge_demo_topo, source_for


REQ = QosRequest(bw_req=5.0, d_req=100.0, j_req=100.0, beta=0.0)


def ctx_for(topo, source):
    coeffs = PenaltyCoeffs.for_request(REQ, topo)
    return RouteContext(topo, source, REQ, coeffs)


@pytest.fixture
def demo_ctx():
    return ctx_for(merge_demo_topo(), source=1)


class TestAlter:
    def test_picks_cheaper_from_source(self, demo_ctx):
        # cost(1->2) = 6 vs cost(1->7) = 3.
        assert alter(2, 7, demo_ctx) == 7

    def test_identity(self, demo_ctx):
        assert alter(5, 5, demo_ctx) == 5

    def test_tie_keeps_first_argument(self):
        topo = make_topo(4, {
            (0, 1): {"cost": 3.0},
            (0, 2): {"cost": 3.0},
            (1, 3): {},
            (2, 3): {},
        }, gateways={3})
        ctx = ctx_for(topo, 0)
        assert alter(1, 2, ctx) == 1
        assert alter(2, 1, ctx) == 2

    def test_commutative_when_costs_differ(self, demo_ctx):
        assert alter(2, 7, demo_ctx) == alter(7, 2, demo_ctx) == 7


class TestCombine:
    def test_merge_walkthrough(self, demo_ctx):
        merged = combine_paths([1, 2, 4, 9, 13], [1, 7, 5, 10, 13],
                               demo_ctx, replace_prob=1.0)
        assert merged == [1, 7, 5, 9, 13]

    def test_zero_coefficients_leave_path_alone(self, demo_ctx):
        config = HybridConfig(c1=0.0, c2=0.0, rng_seed=1)
        particle = Particle(path=[1, 2, 4, 9, 13],
                            pbest_path=[1, 7, 5, 10, 13])
        out = oplus_update(particle, [1, 7, 5, 10, 13], demo_ctx, config,
                           random.Random(0))
        assert out == [1, 2, 4, 9, 13]

    def test_loop_excision(self):
        assert remove_loops([1, 2, 3, 2, 5]) == [1, 2, 5]
        assert remove_loops([1, 2, 1, 3, 1, 4]) == [1, 4]
        assert remove_loops([1, 2, 3]) == [1, 2, 3]

    def test_update_output_always_valid(self, demo_ctx):
        rng = random.Random(3)
        config = HybridConfig(rng_seed=3)
        particle = Particle(path=[1, 2, 4, 9, 13],
                            pbest_path=[1, 7, 5, 10, 13])
        for _ in range(50):
            out = oplus_update(particle, [1, 7, 5, 9, 13], demo_ctx,
                               config, rng)
            assert validate_path(demo_ctx.topo, out)


class TestCrossover:
    def test_crossover_walkthrough_children_pre_repair(self):
        p1 = [1, 7, 5, 8, 12, 15, 21, 24, 25]
        p2 = [1, 7, 5, 10, 17, 19, 22, 25]
        c1, c2 = crossover_children(p1, p2, cuts=((3, 4), (3, 7)))
        assert c1 == [1, 7, 5, 10, 12, 15, 21, 24, 25]
        assert c2 == [1, 7, 5, 8, 12, 15, 21, 25]

    def test_identical_parents_yield_parents(self, demo_ctx):
        p = [1, 7, 5, 9, 13]
        c1, c2 = two_point_crossover(p, p, demo_ctx, random.Random(0))
        assert c1 == p and c2 == p

    def test_degenerate_cut_keeps_parent(self):
        p1 = [1, 2, 3, 4]
        c1, c2 = crossover_children(p1, p1, cuts=((2, 2), (2, 2)))
        assert c1 == p1 and c2 == p1

    def test_short_parents_unchanged(self, demo_ctx):
        c1, c2 = two_point_crossover([1, 13], [1, 13], demo_ctx,
                                     random.Random(0))
        assert c1 == [1, 13] and c2 == [1, 13]

    def test_children_valid_after_repair(self, demo_ctx):
        rng = random.Random(5)
        p1 = [1, 2, 4, 9, 13]
        p2 = [1, 7, 5, 10, 13]
        for _ in range(50):
            c1, c2 = two_point_crossover(p1, p2, demo_ctx, rng)
            assert validate_path(demo_ctx.topo, c1)
            assert validate_path(demo_ctx.topo, c2)


class TestRepair:
    def test_valid_path_unchanged(self, demo_ctx):
        assert repair_path([1, 7, 5, 9, 13], demo_ctx) == [1, 7, 5, 9, 13]

    def test_gap_is_stitched(self, demo_ctx):
        # 7 and 9 are not adjacent; min-cost bridge goes through 5.
        out = repair_path([1, 7, 9, 13], demo_ctx)
        assert out == [1, 7, 5, 9, 13]

    def test_missing_gateway_suffix_appended(self, demo_ctx):
        out = repair_path([1, 7, 5], demo_ctx)
        assert out is not None and out[-1] == 13
        assert validate_path(demo_ctx.topo, out)

    def test_unreachable_node_fails(self, demo_ctx):
        assert repair_path([1, 0, 13], demo_ctx) is None
        assert repair_path([1, 99, 13], demo_ctx) is None


class TestMutate:
    def test_zero_rate_no_change(self, demo_ctx):
        p = [1, 7, 5, 9, 13]
        assert mutate(p, demo_ctx, random.Random(0), 0.0) == p

    def test_articulation_node_keeps_path(self):
        # Only route is the line itself: no detour around the middle node.
        topo = make_topo(3, {(0, 1): {}, (1, 2): {}}, gateways={2})
        ctx = ctx_for(topo, 0)
        out = mutate([0, 1, 2], ctx, random.Random(0), 1.0)
        assert out == [0, 1, 2]

    def test_detour_is_valid_enumerated_path(self):
        # Removing node 2 can be bridged via the 1-4-3 side branch.
        topo = make_topo(5, {(0, 1): {}, (1, 2): {}, (2, 3): {},
                             (1, 4): {}, (4, 3): {}}, gateways={3})
        ctx = ctx_for(topo, 0)
        from meshroute import enumerate_simple_paths
        allowed = enumerate_simple_paths(topo, 0, {3}, max_hops=4)
        mutated = None
        rng = random.Random(1)
        for _ in range(30):
            out = mutate([0, 1, 2, 3], ctx, rng, 1.0)
            assert out in allowed
            if out != [0, 1, 2, 3]:
                mutated = out
        assert mutated == [0, 1, 4, 3]


class TestSwarmMachinery:
    def test_two_node_graph_single_path(self):
        topo = make_topo(2, {(0, 1): {}}, gateways={1})
        ctx = ctx_for(topo, 0)
        swarm = init_swarm(ctx, HybridConfig(swarm_size=5), random.Random(0))
        assert all(p.path == [0, 1] for p in swarm)

    def test_init_deterministic(self):
        topo = generate_topology(TopologyParams(node_count=25, rng_seed=2))
        ctx = ctx_for(topo, source_for(topo))
        a = init_swarm(ctx, HybridConfig(), random.Random(7))
        b = init_swarm(ctx, HybridConfig(), random.Random(7))
        assert [p.path for p in a] == [p.path for p in b]

    def test_init_paths_all_valid(self):
        topo = generate_topology(TopologyParams(node_count=25, rng_seed=2))
        ctx = ctx_for(topo, source_for(topo))
        swarm = init_swarm(ctx, HybridConfig(swarm_size=30), random.Random(1))
        assert len(swarm) == 30
        for p in swarm:
            assert validate_path(topo, p.path)

    def test_unreachable_gateway_raises(self):
        topo = make_topo(3, {(0, 1): {}}, gateways={2})
        ctx = ctx_for(topo, 0)
        with pytest.raises(UnreachableGatewayError):
            init_swarm(ctx, HybridConfig(), random.Random(0))

    def _evaluated_swarm(self, n, ctx, rng):
        swarm = init_swarm(ctx, HybridConfig(swarm_size=n), rng)
        return swarm

    def test_split_arithmetic(self):
        topo = generate_topology(TopologyParams(node_count=25, rng_seed=2))
        ctx = ctx_for(topo, source_for(topo))
        rng = random.Random(0)
        swarm = self._evaluated_swarm(30, ctx, rng)
        config = HybridConfig(swarm_size=30, breed_ratio=0.5,
                              elite_fraction=1 / 3)
        elite, pso_set, ga_set = elitism_split(swarm, config, rng)
        assert len(elite) == 10
        assert len(pso_set) == 10  # (30 - 10) * 0.5
        assert len(ga_set) == 10

    @pytest.mark.parametrize("ratio,pso_n,ga_n", [(0.0, 0, 27), (1.0, 27, 0)])
    def test_split_boundaries(self, ratio, pso_n, ga_n):
        topo = generate_topology(TopologyParams(node_count=25, rng_seed=2))
        ctx = ctx_for(topo, source_for(topo))
        rng = random.Random(0)
        swarm = self._evaluated_swarm(30, ctx, rng)
        config = HybridConfig(swarm_size=30, breed_ratio=ratio)
        elite, pso_set, ga_set = elitism_split(swarm, config, rng)
        assert len(elite) == 3
        assert (len(pso_set), len(ga_set)) == (pso_n, ga_n)

    def test_dedupe_preserves_size_and_distinctness(self):
        topo = generate_topology(TopologyParams(node_count=25, rng_seed=2))
        ctx = ctx_for(topo, source_for(topo))
        rng = random.Random(0)
        base = init_swarm(ctx, HybridConfig(swarm_size=6), rng)
        clones = [Particle(path=list(base[0].path), fitness=base[0].fitness,
                           pbest_path=list(base[0].path),
                           pbest_fitness=base[0].fitness) for _ in range(6)]
        out = dedupe(clones, ctx, rng)
        assert len(out) == 6
        paths = [tuple(p.path) for p in out]
        assert len(set(paths)) == len(paths)

    def test_dedupe_distinct_swarm_untouched(self):
        topo = generate_topology(TopologyParams(node_count=25, rng_seed=2))
        ctx = ctx_for(topo, source_for(topo))
        rng = random.Random(4)
        swarm = init_swarm(ctx, HybridConfig(swarm_size=10), rng)
        distinct = []
        seen = set()
        for p in swarm:
            if tuple(p.path) not in seen:
                seen.add(tuple(p.path))
                distinct.append(p)
        out = dedupe(list(distinct), ctx, rng)
        assert [p.path for p in out] == [p.path for p in distinct]


class TestRun:
    def test_two_node_graph(self):
        topo = make_topo(2, {(0, 1): {}}, gateways={1})
        coeffs = PenaltyCoeffs.for_request(REQ, topo)
        res = run(topo, 0, REQ, coeffs, HybridConfig(rng_seed=0))
        assert res.best_path == [0, 1]
        assert res.iterations_to_best == 1
        assert len(set(res.fitness_trace)) == 1

    @pytest.mark.parametrize("algorithm", ["pso", "ga", "hybrid"])
    def test_deterministic_per_seed(self, algorithm):
        topo = generate_topology(TopologyParams(node_count=25, rng_seed=5))
        coeffs = PenaltyCoeffs.for_request(REQ, topo)
        config = HybridConfig(rng_seed=11, algorithm=algorithm)
        src = source_for(topo)
        a = run(topo, src, REQ, coeffs, config)
        b = run(topo, src, REQ, coeffs, config)
        da, db = a.to_dict(), b.to_dict()
        for d in (da, db):
            d.pop("wall_time_ms")
            d.pop("time_to_best_ms")
            d.pop("iteration_times_ms")
        assert da == db

    def test_trace_nonincreasing_and_matches_best(self):
        topo = generate_topology(TopologyParams(node_count=30, rng_seed=6))
        coeffs = PenaltyCoeffs.for_request(REQ, topo)
        res = run(topo, source_for(topo), REQ, coeffs, HybridConfig(rng_seed=2))
        trace = res.fitness_trace
        assert all(a >= b for a, b in zip(trace, trace[1:]))
        assert trace[-1] == res.best_fitness.total
        assert len(trace) == res.iterations_executed

    def test_matches_oracle_on_small_graph(self):
        topo = generate_topology(TopologyParams(node_count=12, rng_seed=21))
        req = QosRequest(5.0, 10.0, 10.0, 0.5)
        coeffs = PenaltyCoeffs.for_request(req, topo)
        src = source_for(topo)
        res = run(topo, src, req, coeffs, HybridConfig(rng_seed=1))
        _, oracle_fb = oracle_best(topo, src, set(topo.gateways), req, coeffs)
        assert res.best_fitness.total == pytest.approx(oracle_fb.total)

    @pytest.mark.parametrize("algorithm", ["pso", "ga", "hybrid"])
    def test_never_beats_oracle(self, algorithm):
        topo = generate_topology(TopologyParams(node_count=12, rng_seed=9))
        coeffs = PenaltyCoeffs.for_request(REQ, topo)
        src = source_for(topo)
        res = run(topo, src, REQ, coeffs,
                  HybridConfig(rng_seed=3, algorithm=algorithm))
        _, oracle_fb = oracle_best(topo, src, set(topo.gateways), REQ, coeffs)
        assert res.best_fitness.total >= oracle_fb.total - 1e-9

    def test_best_path_always_valid(self):
        topo = generate_topology(TopologyParams(node_count=40, rng_seed=13))
        coeffs = PenaltyCoeffs.for_request(REQ, topo)
        for seed in range(3):
            res = run(topo, source_for(topo), REQ, coeffs, HybridConfig(rng_seed=seed))
            assert validate_path(topo, res.best_path)
