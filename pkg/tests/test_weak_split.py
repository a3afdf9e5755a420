import math

import numpy as np
import pytest

from splitsim.config import DEFAULT_CONFIG
from splitsim.errors import (
    GirthTooSmall,
    PreconditionDelta,
    PreconditionRatio,
)
from splitsim.generators import bipartite_tree, left_regular, random_bipartite
from splitsim.graphs import build_bipartite
from splitsim.ledger import log2
from splitsim.types import BLUE, RED, UNCOLORED, TwoColoring
from splitsim.verify import check_weak_splitting
from splitsim.weak_split import (
    Estimator,
    apply_uncoloring_rule,
    derandomized_weak_split,
    high_girth_weak_split,
    random_weak_split,
    randomized_weak_split,
    rank1_endgame,
    shatter,
    trim_instance,
    trim_then_split,
    weak_split_delta_ge_6r,
    weak_split_speedup,
)

from .conftest import oracle_weak_split_valid


def complete_bipartite(nu, nv):
    return build_bipartite(nu, nv, [(u, v) for u in range(nu) for v in range(nv)])


class TestRandomWeakSplit:
    def test_empty_instance(self):
        b = build_bipartite(0, 0, [])
        c = random_weak_split(b, 1)
        assert c.values.size == 0

    def test_seed_replay_identical(self):
        b = left_regular(10, 50, 8, seed=1)
        assert np.array_equal(random_weak_split(b, 7).values,
                              random_weak_split(b, 7).values)
        assert not np.array_equal(random_weak_split(b, 7).values,
                                  random_weak_split(b, 8).values)

    def test_monte_carlo_failure_rate(self):
        # delta = 2*ceil(log2 n): union bound gives failure <= 2/n
        nu, nv = 16, 48
        n = nu + nv
        d = 2 * math.ceil(log2(n))
        b = left_regular(nu, nv, d, seed=2, r_max=8)
        fails = sum(
            not oracle_weak_split_valid(b, random_weak_split(b, s).values)
            for s in range(1000))
        assert fails / 1000 <= (2 / n) * 1.5


class TestEstimator:
    def test_initial_total_formula(self):
        b = complete_bipartite(4, 8)
        est = Estimator.from_instance(b)
        assert est.total == pytest.approx(2 * 4 * 2.0 ** -8)

    def test_monotone_and_reaches_zero_unsat(self):
        b = complete_bipartite(4, 8)
        est = Estimator.from_instance(b)
        prev = est.total
        for v in range(8):
            est.decide(b, v)
            assert est.total <= prev + 1e-18
            prev = est.total
        assert est.total < 1

    def test_identical_neighborhoods_force_alternation(self):
        b = complete_bipartite(4, 8)
        est = Estimator.from_instance(b)
        first = est.decide(b, 0)
        second = est.decide(b, 1)
        assert first == RED and second == BLUE

    def test_matches_kernel_decisions(self):
        from splitsim._kernels import active as _k
        from splitsim.weak_split import _p2_table

        b = random_bipartite(10, 40, 6, 4, seed=3, dmax=10)
        order = np.random.default_rng(0).permutation(b.right).astype(np.int64)
        p2 = _p2_table(b.Delta + 1, DEFAULT_CONFIG.risk_exp_clamp)
        kcol, kinit, ktrace = _k.condexp_weak_split(
            b.u_ptr, b.u_adj, b.v_ptr, b.v_adj, order, p2)
        est = Estimator.from_instance(b)
        assert est.total == kinit
        for v in order:
            got = est.decide(b, int(v))
            assert got == kcol[v]


class TestDerandomized:
    def test_complete_4x8_valid(self):
        b = complete_bipartite(4, 8)
        col, led = derandomized_weak_split(b)
        assert check_weak_splitting(b, col)
        trace = led.metrics["estimator_trace"]
        assert led.metrics["estimator_initial"] < 1
        assert np.all(np.diff(trace) <= 0)

    def test_precondition_delta(self):
        b = complete_bipartite(8, 8)
        trimmed = trim_instance(b, 2)  # degree 2 < 2*log2(16) = 8
        with pytest.raises(PreconditionDelta):
            derandomized_weak_split(trimmed)

    def test_small_n_rejected(self):
        b = build_bipartite(1, 2, [(0, 0), (0, 1)])
        with pytest.raises(PreconditionDelta):
            derandomized_weak_split(b)

    @pytest.mark.parametrize("seed", range(5))
    def test_always_valid_on_gated_instances(self, seed):
        nu, nv = 20, 80
        d = 2 * math.ceil(log2(nu + nv))
        b = random_bipartite(nu, nv, d, 8, seed=seed, dmax=2 * d)
        col, _ = derandomized_weak_split(b)
        assert oracle_weak_split_valid(b, col.values)


class TestTrimThenSplit:
    def test_trim_noop_at_minimal_delta(self):
        nu, nv = 12, 52
        d = math.ceil(2 * log2(nu + nv))
        b = left_regular(nu, nv, d, seed=4, r_max=6)
        assert np.array_equal(trim_instance(b, d).edges, b.edges)

    def test_trim_caps_max_degree(self):
        nu, nv = 8, 320
        n = nu + nv
        keep = math.ceil(2 * log2(n))
        b = left_regular(nu, nv, 10 * keep // 2, seed=5, r_max=4)
        t = trim_instance(b, keep)
        assert t.Delta == keep
        assert t.u_degrees().max() == keep

    def test_valid_on_untrimmed_instance(self):
        nu, nv = 16, 200
        d = 4 * math.ceil(log2(nu + nv))
        b = left_regular(nu, nv, d, seed=6, r_max=4)
        col, _ = trim_then_split(b)
        assert check_weak_splitting(b, col)


class TestSpeedup:
    def test_delegation_branch(self):
        nu, nv = 16, 100
        d = min(nv, 10 * math.ceil(log2(nu + nv)))
        b = left_regular(nu, nv, d, seed=7, r_max=16)
        col, led = weak_split_speedup(b)
        assert led.metrics["branch"] == "delegate"
        assert check_weak_splitting(b, col)

    def test_reduce_branch_k_at_least_two(self):
        nu, nv = 24, 4000
        d = 50 * math.ceil(log2(nu + nv))
        b = left_regular(nu, nv, d, seed=8, r_max=8)
        assert b.delta > 48 * log2(b.n)
        col, led = weak_split_speedup(b)
        assert led.metrics["branch"] == "reduce" and led.metrics["k"] >= 2
        assert check_weak_splitting(b, col)

    def test_reduced_min_degree_bound(self):
        # 64*log n regular left side: after k reduction rounds the min degree
        # stays above 12 log n - 2
        nu, nv = 16, 4000
        d = 64 * math.ceil(log2(nu + nv))
        b = left_regular(nu, nv, d, seed=9, r_max=8)
        col, led = weak_split_speedup(b)
        assert led.metrics["branch"] == "reduce"
        assert led.metrics["reduced_delta"] >= 12 * log2(b.n) - 2


class TestDeltaGe6r:
    def test_rank1_endgame_direct(self):
        b = build_bipartite(2, 4, [(0, 0), (0, 1), (1, 2), (1, 3)])
        col = rank1_endgame(b)
        assert check_weak_splitting(b, col)

    def test_low_delta_reduce_branch(self):
        b = random_bipartite(30, 700, 12, 2, seed=10)
        assert b.delta >= 6 * b.r and b.delta < 2 * log2(b.n)
        col, led = weak_split_delta_ge_6r(b, "deterministic")
        assert led.metrics["branch"] == "reduce-to-rank-1"
        assert check_weak_splitting(b, col)

    def test_one_iteration_degree_floor(self):
        b = random_bipartite(30, 700, 12, 2, seed=11)
        from splitsim.degree_split import degree_rank_reduction_2

        out, _ = degree_rank_reduction_2(b, 1 / (20 * b.delta), 1)
        assert out.delta >= 12 // 2 - 1 >= 2

    def test_ratio_gate(self):
        b = build_bipartite(1, 5, [(0, v) for v in range(5)])
        assert b.r == 1
        with pytest.raises(PreconditionRatio):
            weak_split_delta_ge_6r(b, "deterministic")

    def test_large_delta_branch(self):
        nu, nv = 16, 256
        d = math.ceil(2 * log2(nu + nv)) + 8
        b = left_regular(nu, nv, d, seed=12, r_max=2)
        assert b.delta >= 6 * b.r
        col, led = weak_split_delta_ge_6r(b, "deterministic")
        assert led.metrics["branch"] == "large-delta"
        assert check_weak_splitting(b, col)

    def test_randomized_mode(self):
        b = random_bipartite(30, 700, 12, 2, seed=13)
        col, _ = weak_split_delta_ge_6r(b, "randomized", seed=5)
        assert check_weak_splitting(b, col)


class TestShatter:
    def test_uncolor_rule_strict_majority(self):
        # 7 of 8 colored: 7/8 > 3/4 -> all uncolored
        b = build_bipartite(1, 8, [(0, v) for v in range(8)])
        colors = np.array([RED] * 4 + [BLUE] * 3 + [UNCOLORED], dtype=np.int8)
        out = apply_uncoloring_rule(b, colors)
        assert np.all(out == UNCOLORED)

    def test_uncolor_rule_boundary_kept(self):
        # exactly 6 of 8 colored: 6/8 == 3/4, not strictly more -> retained
        b = build_bipartite(1, 8, [(0, v) for v in range(8)])
        colors = np.array([RED] * 3 + [BLUE] * 3 + [UNCOLORED] * 2,
                          dtype=np.int8)
        out = apply_uncoloring_rule(b, colors)
        assert np.array_equal(out, colors)

    def test_residual_delta_floor_over_seeds(self):
        b = left_regular(48, 768, 32, seed=14, r_max=8)
        floor = math.ceil(b.delta / 4)
        for s in range(300):
            sh = shatter(b, s)
            if sh.unsatisfied.size:
                assert sh.residual_delta >= floor

    def test_two_simulated_rounds(self):
        b = left_regular(8, 64, 8, seed=15)
        assert shatter(b, 0).simulated_rounds == 2

    def test_deterministic_given_seed(self):
        b = left_regular(8, 64, 8, seed=16)
        a = shatter(b, 3)
        c = shatter(b, 3)
        assert np.array_equal(a.coloring.values, c.coloring.values)
        assert np.array_equal(a.unsatisfied, c.unsatisfied)


class TestRandomized:
    def test_gate(self):
        b = left_regular(10, 60, 6, seed=17)
        with pytest.raises(PreconditionDelta):
            randomized_weak_split(b, 0)

    def test_direct_path(self):
        nu, nv = 40, 3000
        n = nu + nv
        gate = math.ceil(32 * log2(8 * log2(n))) + 2
        b = left_regular(nu, nv, gate, seed=18, r_max=8)
        col, led = randomized_weak_split(b, 3)
        assert led.metrics["path"] == "direct"
        assert check_weak_splitting(b, col)

    def test_shatter_path_merges_validly(self):
        # delta <= 2 log2 n forces the shattering branch (custom gate c)
        cfg = DEFAULT_CONFIG.with_(randomized_gate_c=4.0)
        b = left_regular(4096, 61440, 32, seed=19, r_max=4)
        assert b.delta <= 2 * log2(b.n)
        col, led = randomized_weak_split(b, 7, cfg)
        assert led.metrics["path"] == "shatter"
        assert check_weak_splitting(b, col)
        assert led.metrics["residual_delta"] >= math.ceil(b.delta / 4) or \
            led.metrics["n_components"] == 0

    def test_retry_metric_present(self):
        nu, nv = 40, 3000
        gate = math.ceil(32 * log2(8 * log2(nu + nv))) + 2
        b = left_regular(nu, nv, gate, seed=20, r_max=8)
        _, led = randomized_weak_split(b, 5)
        assert led.metrics["retries"] == 0

    def test_component_budget_exhaustion(self):
        from splitsim.errors import ComponentTooLarge

        cfg = DEFAULT_CONFIG.with_(randomized_gate_c=4.0,
                                   component_budget_k=0.0, retry_limit=2)
        b = left_regular(512, 7680, 30, seed=21, r_max=4)
        assert b.delta <= 2 * log2(b.n)
        with pytest.raises(ComponentTooLarge):
            # every nonempty residual exceeds a zero budget
            for s in range(50):
                randomized_weak_split(b, s, cfg)


@pytest.fixture(scope="module")
def tree():
    return bipartite_tree(2, 32, 3)


class CondExpSLocal2:
    """The conditional-expectation rule as a genuine locality-2 sequential
    program over the incidence graph: each V-node reads only its U-neighbors'
    neighborhoods (distance 2) to evaluate both branch risks."""

    def __init__(self, b, clamp=400):
        self.left = b.left
        self.clamp = clamp

    def process(self, node, view):
        d_red = 0.0
        d_blue = 0.0
        for u in view.neighbors(node):
            has_red = has_blue = False
            und = 0
            for w in view.neighbors(u):
                s = view.state(w) if w != node else None
                if s is None:
                    und += 1
                elif s == RED:
                    has_red = True
                else:
                    has_blue = True
            p = 2.0 ** -min(und, self.clamp)
            pm = 2.0 ** -min(und - 1, self.clamp)
            cur = (0.0 if has_blue else p) + (0.0 if has_red else p)
            d_red += (0.0 if has_blue else pm) - cur
            d_blue += (0.0 if has_red else pm) - cur
        return RED if d_red <= d_blue else BLUE


def test_slocal2_schedule_matches_kernel_solver():
    from splitsim.engine import power_graph_coloring, slocal_to_local

    b = random_bipartite(14, 60, 13, 5, seed=30, dmax=16)
    kernel_col, _ = derandomized_weak_split(b)
    colors, _ = power_graph_coloring(b, 2)
    v_nodes = np.arange(b.left, b.n)
    outputs, ledger = slocal_to_local(CondExpSLocal2(b), b, 2, colors,
                                      subset=v_nodes)
    engine_col = TwoColoring(
        np.array([outputs[b.left + v] for v in range(b.right)],
                 dtype=np.int8))
    assert check_weak_splitting(b, engine_col)
    assert np.array_equal(engine_col.values, kernel_col.values)


class TestHighGirth:
    def test_girth_gate(self):
        b = build_bipartite(2, 2, [(0, 0), (0, 1), (1, 0), (1, 1)])
        with pytest.raises(GirthTooSmall):
            high_girth_weak_split(b, "deterministic")

    def test_randomized_mode_valid(self, tree):
        col, led = high_girth_weak_split(tree, "randomized", seed=21)
        assert check_weak_splitting(tree, col)

    def test_deterministic_mode_valid(self, tree):
        col, led = high_girth_weak_split(tree, "deterministic")
        assert check_weak_splitting(tree, col)

    def test_deterministic_replay_identical(self, tree):
        a, _ = high_girth_weak_split(tree, "deterministic")
        b, _ = high_girth_weak_split(tree, "deterministic")
        assert np.array_equal(a.values, b.values)

    def test_delta_gate(self):
        t = bipartite_tree(2, 2, 2)
        with pytest.raises(PreconditionDelta):
            high_girth_weak_split(t, "deterministic")
