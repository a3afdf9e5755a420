import numpy as np
import pytest

from splitsim.engine import (
    Halt,
    NodeProgram,
    SLocalOrder,
    SLocalProgram,
    power_graph_coloring,
    run_slocal,
    run_sync,
    schedule_order,
    slocal_to_local,
)
from splitsim.errors import (
    InvalidScheduleColoring,
    RadiusViolation,
    RoundLimitExceeded,
    UnsupportedRadius,
)
from splitsim.generators import complete_graph, gnp_graph
from splitsim.graphs import graph_from_id_edges

from .conftest import adj_dict, bfs_dist, oracle_eccentricity


class OutputId(NodeProgram):
    def step(self, state, rnd, inbox, ctx):
        return None, Halt(ctx.node_id)


class CollectNeighbors(NodeProgram):
    def step(self, state, rnd, inbox, ctx):
        if rnd == 0:
            return {int(u): ctx.node_id for u in ctx.neighbors}, None
        return None, Halt(sorted(inbox.values()))


class Flood(NodeProgram):
    """Every node floods a token from node 0; halts when it has heard it and
    all neighbors have too (halts after eccentricity(0) rounds at the rim)."""

    def init(self, ctx):
        return {"have": ctx.node == 0}

    def step(self, state, rnd, inbox, ctx):
        heard = bool(inbox)
        if state["have"]:
            return {int(u): 1 for u in ctx.neighbors}, Halt(rnd)
        if heard:
            state["have"] = True
            return {int(u): 1 for u in ctx.neighbors}, Halt(rnd)
        return None, None


class TestRunSync:
    def test_zero_round_identity(self):
        g = graph_from_id_edges([(10, 20), (20, 30)])
        outputs, ledger = run_sync(OutputId(), g)
        assert outputs == {0: 10, 1: 20, 2: 30}
        assert ledger.total_simulated == 0

    def test_collect_neighbors_on_path(self):
        g = graph_from_id_edges([(0, 1), (1, 2)])
        outputs, ledger = run_sync(CollectNeighbors(), g)
        assert outputs[1] == [0, 2]
        assert outputs[0] == [1] and outputs[2] == [1]
        assert ledger.total_simulated == 1

    def test_flood_halts_at_eccentricity(self, rng):
        g = gnp_graph(25, 0.12, seed=13)
        adj = adj_dict(g)
        if len(bfs_dist(adj, 0)) < g.n:
            pytest.skip("sampled graph disconnected")
        outputs, _ = run_sync(Flood(), g)
        assert max(outputs.values()) == oracle_eccentricity(adj, 0)

    def test_round_limit(self):
        class Never(NodeProgram):
            def step(self, state, rnd, inbox, ctx):
                return None, None

        g = graph_from_id_edges([(0, 1)])
        with pytest.raises(RoundLimitExceeded):
            run_sync(Never(), g, max_rounds=5)

    def test_same_round_messages_invisible(self):
        """Synchrony: a message sent at round t arrives at t+1, never at t."""
        seen = {}

        class Probe(NodeProgram):
            def step(self, state, rnd, inbox, ctx):
                seen.setdefault(ctx.node, {})[rnd] = dict(inbox)
                if rnd == 0:
                    return {int(u): "hello" for u in ctx.neighbors}, None
                return None, Halt(None)

        g = graph_from_id_edges([(0, 1)])
        run_sync(Probe(), g)
        assert seen[0][0] == {} and seen[1][0] == {}
        assert seen[0][1] == {1: "hello"} and seen[1][1] == {0: "hello"}

    def test_deterministic_given_seed(self):
        class Coin(NodeProgram):
            def step(self, state, rnd, inbox, ctx):
                return None, Halt(int(ctx.rng(rnd).integers(0, 2**30)))

        g = gnp_graph(10, 0.3, seed=3)
        a, _ = run_sync(Coin(), g, seed=99)
        b, _ = run_sync(Coin(), g, seed=99)
        c, _ = run_sync(Coin(), g, seed=100)
        assert a == b
        assert a != c


class GreedyColorSLocal(SLocalProgram):
    def process(self, node, view):
        used = set()
        for u in view.neighbors(node):
            s = view.state(u)
            if s is not None:
                used.add(s)
        c = 0
        while c in used:
            c += 1
        return c


class TestRunSlocal:
    def test_greedy_on_k4_uses_four_colors(self):
        g = complete_graph(4)
        out = run_slocal(GreedyColorSLocal(), g,
                         SLocalOrder(np.arange(4), k=1))
        assert sorted(out.values()) == [0, 1, 2, 3]

    def test_two_orders_both_proper(self):
        g = gnp_graph(15, 0.3, seed=5)
        adj = adj_dict(g)
        for order in (np.arange(g.n), np.arange(g.n)[::-1].copy()):
            out = run_slocal(GreedyColorSLocal(), g, SLocalOrder(order, k=1))
            for x in range(g.n):
                assert all(out[x] != out[y] for y in adj[x])

    def test_empty_graph(self):
        g = graph_from_id_edges([], node_ids=[])
        out = run_slocal(GreedyColorSLocal(), g, SLocalOrder(np.zeros(0), k=1))
        assert out == {}

    def test_radius_enforced(self):
        class Peek(SLocalProgram):
            def process(self, node, view):
                return view.state(3)  # distance 3 from node 0 on a path

        g = graph_from_id_edges([(0, 1), (1, 2), (2, 3)])
        with pytest.raises(RadiusViolation):
            run_slocal(Peek(), g, SLocalOrder(np.array([0]), k=2))

    def test_replay_exact(self):
        g = gnp_graph(12, 0.3, seed=8)
        order = SLocalOrder(np.random.default_rng(1).permutation(g.n), k=1)
        a = run_slocal(GreedyColorSLocal(), g, order)
        b = run_slocal(GreedyColorSLocal(), g, order)
        assert a == b


class TestPowerGraphColoring:
    def test_path_five_k2(self):
        g = graph_from_id_edges([(i, i + 1) for i in range(4)])
        colors, _ = power_graph_coloring(g, 2)
        dist = {v: bfs_dist(adj_dict(g), v) for v in range(5)}
        for x in range(5):
            for y in range(x + 1, 5):
                if dist[x].get(y, 99) <= 2:
                    assert colors[x] != colors[y]
        assert int(colors.max()) + 1 <= 5

    def test_single_node(self):
        g = graph_from_id_edges([], node_ids=[0])
        colors, _ = power_graph_coloring(g, 2)
        assert list(colors) == [0]

    def test_star_k2_all_distinct(self):
        g = graph_from_id_edges([(0, i) for i in range(1, 5)])
        colors, _ = power_graph_coloring(g, 2)
        assert len(set(colors.tolist())) == 5

    def test_validity_bruteforce_random(self):
        for seed, n in ((0, 60), (1, 60), (2, 60), (3, 200)):
            g = gnp_graph(n, 0.06, seed=seed)
            for k in (2, 4):
                colors, _ = power_graph_coloring(g, k)
                adj = adj_dict(g)
                for v in range(g.n):
                    dist = bfs_dist(adj, v)
                    for y, d in dist.items():
                        if y != v and d <= k:
                            assert colors[v] != colors[y]

    def test_unsupported_radius(self):
        g = complete_graph(3)
        with pytest.raises(UnsupportedRadius):
            power_graph_coloring(g, 3)


class TestSlocalToLocal:
    def test_single_class_when_independent(self):
        g = graph_from_id_edges([], node_ids=[0, 1, 2])
        colors = np.zeros(3, dtype=np.int64)
        out, ledger = slocal_to_local(GreedyColorSLocal(), g, 1, colors)
        assert ledger.phases[0].simulated_rounds == 1  # C*k = 1*1

    def test_k3_three_classes_three_phases(self):
        g = complete_graph(3)
        colors, _ = power_graph_coloring(g, 2)
        assert len(set(colors.tolist())) == 3
        out, ledger = slocal_to_local(GreedyColorSLocal(), g, 2, colors)
        assert ledger.phases[-1].simulated_rounds == 3 * 2

    def test_invalid_schedule_rejected(self):
        g = complete_graph(3)
        with pytest.raises(InvalidScheduleColoring):
            slocal_to_local(GreedyColorSLocal(), g, 1,
                            np.array([0, 0, 1], dtype=np.int64))

    def test_matches_sequential_run(self):
        g = gnp_graph(30, 0.12, seed=4)
        colors, _ = power_graph_coloring(g, 1)
        out_local, _ = slocal_to_local(GreedyColorSLocal(), g, 1, colors)
        order = schedule_order(colors)
        out_seq = run_slocal(GreedyColorSLocal(), g, SLocalOrder(order, 1))
        assert out_local == out_seq
