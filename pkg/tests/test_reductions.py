import itertools
import math

import numpy as np
import pytest

from splitsim.errors import (
    EstimatorOverflow,
    MinDegreeTooSmall,
    NotAWeakSplitting,
    PreconditionDegree,
)
from splitsim.generators import (
    complete_graph,
    degree_bounded_graph,
    gnp_graph,
    min_degree_graph,
)
from splitsim.graphs import build_bipartite, graph_from_id_edges
from splitsim.reductions import (
    coloring_via_splitting,
    greedy_base_coloring,
    greedy_mis,
    mis_via_splitting,
    pad_to_uniform,
    sinkless_instance,
    splitting_to_orientation,
    strong_split_bipartite,
)
from splitsim.types import BLUE, RED, TwoColoring
from splitsim.verify import (
    check_mis,
    check_proper_coloring,
    check_sinkless,
    check_uniform_split,
    check_weak_splitting,
)
from splitsim.weak_split import weak_split_delta_ge_6r

from .conftest import adj_dict, brute_force_weak_split


class TestSinklessInstance:
    def test_k6_min_node_joins_all_edges(self):
        k6 = complete_graph(6)
        inst = sinkless_instance(k6)
        assert inst.u_degree(0) == 5  # all 5 neighbors have larger ids

    def test_k6_node2_majority_rule(self):
        k6 = complete_graph(6)
        inst = sinkless_instance(k6)
        eidx = {tuple(map(int, e)): i for i, e in enumerate(k6.edges)}
        assert sorted(inst.u_neighbors(2).tolist()) == sorted(
            [eidx[(2, 3)], eidx[(2, 4)], eidx[(2, 5)]])

    def test_rank_at_most_two_always(self):
        for seed in range(8):
            g = min_degree_graph(12, 5, seed=seed)
            inst = sinkless_instance(g)
            assert inst.r <= 2
            assert inst.delta >= math.ceil(g.min_degree() / 2) >= 3

    def test_min_degree_gate(self):
        g = gnp_graph(8, 0.3, seed=1)
        if g.min_degree() >= 5:
            pytest.skip("dense draw")
        with pytest.raises(MinDegreeTooSmall):
            sinkless_instance(g)


class TestSplittingToOrientation:
    def test_all_red_orients_small_to_large(self):
        k6 = complete_graph(6)
        inst = sinkless_instance(k6)
        col = brute_force_weak_split(inst)
        o = splitting_to_orientation(k6, inst, col)
        for e, (a, b) in enumerate(k6.edges):
            if col.values[e] == RED:
                tail = int(a) if k6.node_ids[a] < k6.node_ids[b] else int(b)
            else:
                tail = int(a) if k6.node_ids[a] > k6.node_ids[b] else int(b)
            got_tail = int(k6.edges[e][0]) if o.dirs[e] == 0 else int(k6.edges[e][1])
            assert got_tail == tail

    def test_invalid_splitting_rejected(self):
        k6 = complete_graph(6)
        inst = sinkless_instance(k6)
        with pytest.raises(NotAWeakSplitting):
            splitting_to_orientation(
                k6, inst, TwoColoring(np.full(inst.right, RED, dtype=np.int8)))

    def test_pipeline_on_random_graphs(self):
        for seed in range(10):
            g = min_degree_graph(36, 24, seed=seed)
            inst = sinkless_instance(g)
            col, _ = weak_split_delta_ge_6r(inst, "deterministic")
            o = splitting_to_orientation(g, inst, col)
            assert check_sinkless(g, o).valid

    def test_universal_structural_property(self):
        """Every instance edge at u orients outward under the color u needs:
        up-type nodes join only larger-id edges, down-type only smaller."""
        for seed in range(6):
            g = min_degree_graph(14, 5, seed=seed)
            inst = sinkless_instance(g)
            ids = g.node_ids
            for u in range(g.n):
                larger = sum(1 for y in adj_dict(g)[u] if ids[y] > ids[u])
                up = 2 * larger >= g.degree(u)
                for e in inst.u_neighbors(u):
                    a, b = map(int, g.edges[e])
                    other = b if a == u else a
                    assert (ids[other] > ids[u]) == up


class TestPadToUniform:
    def test_full_degree_node_untouched(self):
        g = complete_graph(5)  # all degrees 4
        padded, mask = pad_to_uniform(g, 4)
        assert padded.n == g.n and not mask.any()

    def test_isolated_node_gets_clique(self):
        g = graph_from_id_edges([], node_ids=[0])
        padded, mask = pad_to_uniform(g, 4)
        assert padded.n == 5 and int(mask.sum()) == 4
        assert padded.degree(0) == 4

    def test_gadget_degrees_at_most_delta(self):
        g = graph_from_id_edges([(0, 1), (1, 2)], node_ids=[0, 1, 2, 3])
        padded, mask = pad_to_uniform(g, 5)
        assert padded.degrees()[~mask].min() >= 5
        assert padded.degrees()[mask].max() <= 5


class TestStrongSplit:
    def test_degree_two_quarter_eps_forces_one_one(self):
        b = build_bipartite(1, 2, [(0, 0), (0, 1)])
        col, _ = strong_split_bipartite(b, 0.25, degree_floor=0.0)
        assert sorted(col.values.tolist()) == [RED, BLUE]

    def test_d40_interval_over_orders(self):
        from splitsim._kernels import active as _k

        rng = np.random.default_rng(2)
        edges = [(u, int(v)) for u in range(8)
                 for v in rng.choice(56, 40, replace=False)]
        b = build_bipartite(8, 56, edges)
        degs = b.u_degrees()
        lo = np.ceil(0.3 * degs - 1e-9).astype(np.int64)
        hi = np.floor(0.7 * degs + 1e-9).astype(np.int64)
        p2n = np.ldexp(1.0, -np.arange(int(degs.max()) + 2))
        for trial in range(100):
            order = np.random.default_rng(trial).permutation(b.right).astype(
                np.int64)
            colors, initial, _ = _k.condexp_strong_split(
                b.u_ptr, b.u_adj, b.v_ptr, b.v_adj, order, lo, hi,
                np.ones(b.left, dtype=np.uint8), p2n)
            assert initial < 1
            assert check_uniform_split(b, TwoColoring(colors), 0.2).valid

    def test_estimator_overflow_raised(self):
        # many low-degree constraints: certificate impossible
        b = build_bipartite(40, 80, [(u, v) for u in range(40)
                                     for v in (2 * u, 2 * u + 1)])
        with pytest.raises(EstimatorOverflow):
            strong_split_bipartite(b, 0.05, degree_floor=0.0)

    def test_degree_floor_gate(self):
        b = build_bipartite(2, 8, [(0, v) for v in range(8)]
                            + [(1, v) for v in range(4)])
        with pytest.raises(PreconditionDegree):
            strong_split_bipartite(b, 0.2)


class TestColoringViaSplitting:
    def test_base_case_below_threshold(self):
        g = gnp_graph(20, 0.2, seed=3)
        pc, led = coloring_via_splitting(g, 0.2, levels=0)
        assert pc.palette <= g.max_degree() + 1
        assert check_proper_coloring(g, pc).valid

    def test_one_level_delta_40(self):
        g = degree_bounded_graph(60, 40, seed=4)
        assert g.max_degree() == 40
        pc, led = coloring_via_splitting(g, 0.2, levels=1)
        # both halves stay below (1/2+eps)*Delta = 28
        assert led.metrics["delta_star"] <= 28
        assert pc.palette <= 2 * (led.metrics["delta_star"] + 1) <= 2 * 29
        assert check_proper_coloring(g, pc).valid

    def test_palette_cap_holds_two_levels(self):
        g = degree_bounded_graph(140, 80, seed=5)
        assert g.max_degree() == 80
        pc, led = coloring_via_splitting(g, 0.2, levels=2)
        cap = 2 ** led.metrics["depth"] * (led.metrics["delta_star"] + 1)
        assert pc.palette <= cap
        assert check_proper_coloring(g, pc).valid

    def test_greedy_base_examples(self):
        assert greedy_base_coloring(complete_graph(4)).palette == 4
        g = graph_from_id_edges([], node_ids=[])
        assert greedy_base_coloring(g).palette == 0
        bip = graph_from_id_edges([(i, 5 + (i % 3)) for i in range(5)])
        pc = greedy_base_coloring(bip)
        assert pc.palette <= bip.max_degree() + 1
        assert check_proper_coloring(bip, pc).valid


def all_maximal_independent_sets(g):
    n = g.n
    edges = {tuple(map(int, e)) for e in g.edges}
    sets = []
    for bits in itertools.product([0, 1], repeat=n):
        members = [i for i in range(n) if bits[i]]
        if any(bits[a] and bits[b] for a, b in edges):
            continue
        if all(bits[i] or any(bits[j] for j in range(n)
                              if (min(i, j), max(i, j)) in edges)
               for i in range(n)):
            sets.append(frozenset(members))
    return sets


class TestMis:
    def test_edgeless_all_selected(self):
        g = graph_from_id_edges([], node_ids=list(range(5)))
        s, _ = mis_via_splitting(g)
        assert s.members.size == 5

    def test_k5_single_node(self):
        s, _ = mis_via_splitting(complete_graph(5))
        assert s.members.size == 1

    def test_c5_matches_enumeration(self):
        c5 = graph_from_id_edges([(i, (i + 1) % 5) for i in range(5)])
        sizes = {len(s) for s in all_maximal_independent_sets(c5)}
        assert sizes == {2}
        assert greedy_mis(c5).members.size == 2

    def test_greedy_size_bound_kn(self):
        for n in (3, 6, 10):
            s = greedy_mis(complete_graph(n))
            assert s.members.size == 1 == math.ceil(n / (n - 1 + 1))

    def test_pipeline_on_corpus(self):
        for seed in range(6):
            g = degree_bounded_graph(300, 48, seed=seed)
            s, led = mis_via_splitting(g, 0.2)
            assert check_mis(g, s).valid
            for frac in led.metrics["coverage_fractions"]:
                assert frac >= 0

    def test_coverage_fraction_bound(self):
        g = degree_bounded_graph(800, 96, seed=9)
        _, led = mis_via_splitting(g, 0.2)
        logn = math.log2(g.n)
        bar = 1.0 / (80 * logn ** 3)
        fr = led.metrics["coverage_fractions"]
        assert fr and all(f >= bar for f in fr)

    def test_iteration_budget_guard(self):
        from splitsim.config import DEFAULT_CONFIG
        from splitsim.errors import IterationBudgetExceeded

        g = degree_bounded_graph(300, 64, seed=10)
        cfg = DEFAULT_CONFIG.with_(mis_iteration_budget_k=0.0)
        with pytest.raises(IterationBudgetExceeded):
            mis_via_splitting(g, 0.2, cfg)
