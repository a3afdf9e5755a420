"""Weak-splitting solvers.

All solvers return a complete TwoColoring that has already passed
check_weak_splitting on the instance they were handed (they self-verify), plus
a RoundLedger. Randomized solvers retry with a fresh seed substream when a
high-probability event fails, up to the configured limit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import active as _k
from .config import DEFAULT_CONFIG, SplitConfig
from .degree_split import degree_rank_reduction_1, degree_rank_reduction_2
from .engine import power_graph_coloring, schedule_order
from .errors import (
    ComponentTooLarge,
    GapViolation,
    GirthTooSmall,
    NotAWeakSplitting,
    PreconditionDelta,
    PreconditionRatio,
    RetryExhausted,
    ShrinkageViolation,
)
from .graphs import (
    BipartiteInstance,
    Subinstance,
    connected_components,
    girth,
    split_heavy_left_nodes,
)
from .ledger import RoundLedger, log2
from .types import BLUE, RED, UNCOLORED, TwoColoring
from .verify import check_weak_splitting

_SEED_MASK = 2**64 - 1


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, (tuple, list)):
        entropy = tuple(int(s) & _SEED_MASK for s in seed)
    else:
        entropy = int(seed) & _SEED_MASK
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def _sub_seed(seed: int, attempt: int) -> int:
    ss = np.random.SeedSequence((int(seed) & _SEED_MASK, int(attempt)))
    return int(ss.generate_state(1, np.uint64)[0])


def _self_verify(b: BipartiteInstance, coloring: TwoColoring) -> None:
    verdict = check_weak_splitting(b, coloring)
    if not verdict:
        raise NotAWeakSplitting(
            f"solver produced an invalid splitting: {verdict.violations[:3]}")


def _require_delta(b: BipartiteInstance) -> None:
    need = 2.0 * log2(max(b.n, 2))
    if b.n < 4:
        raise PreconditionDelta(f"instance has n={b.n} < 4")
    if b.delta < need:
        raise PreconditionDelta(f"delta={b.delta} < 2*log2(n)={need:.3f}")


def _p2_table(max_exp: int, clamp: int) -> np.ndarray:
    exps = np.minimum(np.arange(max_exp + 2), clamp)
    return np.ldexp(1.0, -exps.astype(np.int64))


# =============================================================================
# Estimator (reference semantics of the conditional-expectation greedy)
# =============================================================================

@dataclass
class Estimator:
    """Per-U (red_risk, blue_risk): the exact probability, under uniform
    completion of the undecided V-nodes, that u ends all-red / all-blue.

    A risk is 2^-(undecided neighbor count) while no opposite-color neighbor
    exists, else 0. total < 1 guarantees the greedy finishes with zero
    monochromatic U-nodes.
    """

    red_risk: np.ndarray
    blue_risk: np.ndarray
    undecided: np.ndarray
    _p2: np.ndarray

    @classmethod
    def from_instance(cls, b: BipartiteInstance,
                      clamp: int = DEFAULT_CONFIG.risk_exp_clamp) -> "Estimator":
        deg = b.u_degrees()
        p2 = _p2_table(int(deg.max()) if b.left else 1, clamp)
        risk = p2[deg].astype(np.float64)
        return cls(risk.copy(), risk.copy(), deg.astype(np.int64).copy(), p2)

    @property
    def total(self) -> float:
        return float(self.red_risk.sum() + self.blue_risk.sum())

    def deltas(self, b: BipartiteInstance, v: int) -> tuple[float, float]:
        """(delta if v turns red, delta if v turns blue)."""
        d_red = 0.0
        d_blue = 0.0
        for u in b.v_neighbors(v):
            p = self._p2[self.undecided[u]]
            pm = self._p2[self.undecided[u] - 1]
            cur = (p if self.red_risk[u] > 0 else 0.0) + \
                  (p if self.blue_risk[u] > 0 else 0.0)
            d_red += (pm if self.red_risk[u] > 0 else 0.0) - cur
            d_blue += (pm if self.blue_risk[u] > 0 else 0.0) - cur
        return d_red, d_blue

    def apply(self, b: BipartiteInstance, v: int, color: int) -> None:
        for u in b.v_neighbors(v):
            self.undecided[u] -= 1
            pm = self._p2[self.undecided[u]]
            if color == RED:
                self.blue_risk[u] = 0.0
                if self.red_risk[u] > 0:
                    self.red_risk[u] = pm
            else:
                self.red_risk[u] = 0.0
                if self.blue_risk[u] > 0:
                    self.blue_risk[u] = pm

    def decide(self, b: BipartiteInstance, v: int) -> int:
        d_red, d_blue = self.deltas(b, v)
        color = RED if d_red <= d_blue else BLUE
        self.apply(b, v, color)
        return color


# =============================================================================
# Solvers
# =============================================================================

def random_weak_split(b: BipartiteInstance, seed: int = 0) -> TwoColoring:
    """Uniform i.i.d. red/blue per V-node; zero communication rounds.

    Valid w.h.p. only when delta >= 2 log2 n; the caller verifies.
    """
    rng = _rng(seed)
    draws = rng.integers(0, 2, size=b.right)
    return TwoColoring(np.where(draws == 0, RED, BLUE).astype(np.int8))


def derandomized_weak_split(b: BipartiteInstance,
                            config: SplitConfig = DEFAULT_CONFIG):
    """Conditional-expectation greedy scheduled by a distance-2 coloring.

    Each V-node, in (schedule class, id) order, takes the color minimizing the
    exact expected number of monochromatic U-neighborhoods. Requires
    delta >= 2 log2 n and n >= 4, which make the initial estimator total < 1;
    the trace then never increases, so the result is always valid.
    """
    _require_delta(b)
    sched_colors, led_pc = power_graph_coloring(b, 2)
    v_nodes = np.arange(b.left, b.n)
    order = schedule_order(sched_colors, v_nodes) - b.left
    p2 = _p2_table(int(b.u_degrees().max()) if b.left else 1,
                   config.risk_exp_clamp)
    colors, initial, trace = _k.condexp_weak_split(
        b.u_ptr, b.u_adj, b.v_ptr, b.v_adj, order.astype(np.int64), p2)
    if initial >= 1.0:
        raise PreconditionDelta(
            f"initial estimator total {initial} >= 1 despite delta gate")
    coloring = TwoColoring(colors)
    ledger = RoundLedger()
    ledger.extend(led_pc)
    nclasses = int(np.unique(sched_colors[v_nodes]).size) if v_nodes.size else 0
    ledger.charge("cond-exp decisions", nclasses * 2,
                  max(1, b.Delta * b.r), "Delta*r")
    ledger.metrics["estimator_initial"] = float(initial)
    ledger.metrics["estimator_trace"] = trace
    ledger.metrics["estimator_final"] = float(trace[-1]) if trace.size else float(initial)
    _self_verify(b, coloring)
    return coloring, ledger


def trim_instance(b: BipartiteInstance, keep: int) -> BipartiteInstance:
    """Each U-node keeps its first min(deg, keep) neighbors in V-id order."""
    parts = []
    for u in range(b.left):
        nbrs = b.u_neighbors(u)[:keep]
        parts.append(np.stack([np.full(nbrs.size, u, dtype=np.int64), nbrs], axis=1))
    edges = np.concatenate(parts, axis=0) if parts else np.zeros((0, 2), np.int64)
    return BipartiteInstance(b.left, b.right, edges)


def trim_then_split(b: BipartiteInstance, config: SplitConfig = DEFAULT_CONFIG):
    """Trim every U-node to ceil(2 log2 n) edges, then derandomize.

    Valid on the original instance because adding edges back cannot destroy a
    weak splitting.
    """
    _require_delta(b)
    keep = math.ceil(2.0 * log2(b.n))
    trimmed = trim_instance(b, keep)
    coloring, inner = derandomized_weak_split(trimmed, config)
    ledger = RoundLedger()
    ledger.charge("trim", 1, 1, "1")
    ledger.extend(inner)
    ledger.charge("trim-then-split total", 0,
                  max(1, b.r * log2(max(b.n, 2))), "r*log n")
    _self_verify(b, coloring)
    return coloring, ledger


def weak_split_speedup(b: BipartiteInstance, config: SplitConfig = DEFAULT_CONFIG):
    """Degree-rank reduction pipeline behind the r/delta*polylog bound.

    Small delta (<= 48 log n) delegates to trim_then_split; otherwise k
    reduction rounds with eps = min(1/k, 1/3), k = floor(log2(delta/(12 log n))),
    shrink the instance until the trim pipeline applies.
    """
    _require_delta(b)
    ln = log2(b.n)
    ledger = RoundLedger()
    if b.delta <= 48.0 * ln:
        coloring, inner = trim_then_split(b, config)
        ledger.extend(inner)
        ledger.metrics["branch"] = "delegate"
        _self_verify(b, coloring)
        return coloring, ledger
    k = int(math.floor(log2(b.delta / (12.0 * ln))))
    eps = min(1.0 / k, 1.0 / 3.0)
    reduced, led_red = degree_rank_reduction_1(b, eps, k)
    ledger.extend(led_red)
    if reduced.delta < 2.0 * ln:
        raise ShrinkageViolation(
            f"reduced delta {reduced.delta} < 2 log n = {2.0 * ln:.3f}")
    r_cap = 24.0 * math.e * (b.r / b.delta) * ln + 3.0
    if not reduced.r <= r_cap:
        raise ShrinkageViolation(
            f"reduced rank {reduced.r} > 24e*(r/delta)*log n + 3 = {r_cap:.3f}")
    coloring, inner = trim_then_split(reduced, config)
    ledger.extend(inner)
    ledger.metrics["branch"] = "reduce"
    ledger.metrics["k"] = k
    ledger.metrics["eps"] = eps
    ledger.metrics["reduced_delta"] = reduced.delta
    ledger.metrics["reduced_r"] = reduced.r
    _self_verify(b, coloring)
    return coloring, ledger


def rank1_endgame(b: BipartiteInstance) -> TwoColoring:
    """On a rank-1 instance with min U-degree >= 2, each U-node designates one
    neighbor red and another blue; leftover V-nodes default to red."""
    if b.r > 1:
        raise PreconditionRatio(f"endgame needs rank 1, got r={b.r}")
    if b.left and b.delta < 2:
        raise PreconditionDelta(f"endgame needs min degree >= 2, got {b.delta}")
    colors = np.full(b.right, RED, dtype=np.int8)
    for u in range(b.left):
        nbrs = b.u_neighbors(u)
        colors[nbrs[0]] = RED
        colors[nbrs[1]] = BLUE
    return TwoColoring(colors)


def weak_split_delta_ge_6r(b: BipartiteInstance, mode: str = "deterministic",
                           seed: int = 0,
                           config: SplitConfig = DEFAULT_CONFIG):
    """Solver for delta >= 6r: collapse the rank to 1, then designate colors.

    With delta >= 2 log n it defers to the general pipeline instead.
    """
    if mode not in ("deterministic", "randomized"):
        raise ValueError(f"unknown mode {mode!r}")
    if b.delta < 6 * b.r:
        raise PreconditionRatio(f"delta={b.delta} < 6*r={6 * b.r}")
    randomized = mode == "randomized"
    ledger = RoundLedger()
    if b.n >= 4 and b.delta >= 2.0 * log2(b.n):
        if randomized:
            coloring, inner = _random_verified(b, seed, config)
        else:
            coloring, inner = weak_split_speedup(b, config)
        ledger.extend(inner)
        ledger.metrics["branch"] = "large-delta"
        return coloring, ledger
    eps = 1.0 / (20.0 * max(b.delta, 1))
    k = math.ceil(log2(max(b.r, 1)))
    reduced, led_red = degree_rank_reduction_2(b, eps, k, randomized=randomized)
    ledger.extend(led_red)
    if reduced.r > 1 or (reduced.left and reduced.delta < 2):
        raise ShrinkageViolation(
            f"endgame expects rank 1 and min degree >= 2, got "
            f"r={reduced.r}, delta={reduced.delta}")
    coloring = rank1_endgame(reduced)
    ledger.charge("rank-1 endgame", 1, 1, "1")
    ledger.metrics["branch"] = "reduce-to-rank-1"
    ledger.metrics["reduced_r"] = reduced.r
    ledger.metrics["reduced_delta"] = reduced.delta
    _self_verify(b, coloring)
    return coloring, ledger


def _random_verified(b: BipartiteInstance, seed: int, config: SplitConfig):
    """Zero-round random coloring with verification and retries."""
    ledger = RoundLedger()
    for attempt in range(config.retry_limit + 1):
        coloring = random_weak_split(b, _sub_seed(seed, attempt))
        if check_weak_splitting(b, coloring):
            ledger.charge("random coloring", 0, 1, "0 rounds + 1 check")
            ledger.metrics["retries"] = attempt
            return coloring, ledger
    raise RetryExhausted(
        f"random coloring failed verification {config.retry_limit + 1} times")


# =============================================================================
# Shattering
# =============================================================================

@dataclass
class ShatterResult:
    """Partial coloring plus the residual of unsatisfied/uncolored nodes."""

    coloring: TwoColoring       # partial over V
    satisfied: np.ndarray       # bool per U
    unsatisfied: np.ndarray     # U indices
    uncolored: np.ndarray       # V indices
    residual_delta: int         # min residual degree over unsatisfied U (0 if none)
    simulated_rounds: int = 2

    def components(self, b: BipartiteInstance) -> list[Subinstance]:
        return connected_components(b, self.unsatisfied, self.uncolored)


def apply_uncoloring_rule(b: BipartiteInstance, colors: np.ndarray) -> np.ndarray:
    """Every U-node with strictly more than 3/4 colored neighbors uncolors all
    of them (integer comparison 4*count > 3*deg); returns a new array."""
    colors = colors.copy()
    deg = b.u_degrees()
    if b.m:
        colored_edge = colors[b.edges[:, 1]] != UNCOLORED
        cnt = np.bincount(b.edges[:, 0], weights=colored_edge.astype(np.float64),
                          minlength=b.left).astype(np.int64)
    else:
        cnt = np.zeros(b.left, dtype=np.int64)
    over = 4 * cnt > 3 * deg
    if np.any(over) and b.m:
        touched = b.edges[over[b.edges[:, 0]], 1]
        colors[touched] = UNCOLORED
    return colors


def _shatter_result(b: BipartiteInstance, colors: np.ndarray) -> ShatterResult:
    """Assemble satisfaction state and the residual summary for final colors."""
    has_red = np.zeros(b.left, dtype=bool)
    has_blue = np.zeros(b.left, dtype=bool)
    if b.m:
        ecol = colors[b.edges[:, 1]]
        np.logical_or.at(has_red, b.edges[:, 0], ecol == RED)
        np.logical_or.at(has_blue, b.edges[:, 0], ecol == BLUE)
    satisfied = has_red & has_blue
    unsatisfied = np.flatnonzero(~satisfied)
    uncolored = np.flatnonzero(colors == UNCOLORED)
    if unsatisfied.size and b.m:
        unc_edge = (colors[b.edges[:, 1]] == UNCOLORED) & ~satisfied[b.edges[:, 0]]
        rdeg = np.bincount(b.edges[unc_edge, 0], minlength=b.left)
        residual_delta = int(rdeg[unsatisfied].min())
    else:
        residual_delta = 0
    return ShatterResult(TwoColoring(colors), satisfied, unsatisfied,
                         uncolored, residual_delta)


def shatter(b: BipartiteInstance, seed: int = 0) -> ShatterResult:
    """One round of red(1/4)/blue(1/4)/uncolored(1/2) plus the uncoloring rule.

    The rule guarantees every U-node retains at least ceil(deg/4) uncolored
    neighbors, so unsatisfied U-nodes keep residual degree >= ceil(delta/4).
    """
    rng = _rng(seed)
    draws = rng.integers(0, 4, size=b.right)
    colors = np.zeros(b.right, dtype=np.int8)
    colors[draws == 0] = RED
    colors[draws == 1] = BLUE
    return _shatter_result(b, apply_uncoloring_rule(b, colors))


def _component_budget(b: BipartiteInstance, config: SplitConfig) -> float:
    return config.component_budget_k * max(b.r, 1) ** 4 \
        * log2(max(b.n, 2)) ** 6


def _solve_residual(b: BipartiteInstance, sh: ShatterResult,
                    config: SplitConfig, solver) -> tuple[TwoColoring, RoundLedger]:
    """Finish a shattering run: solve residual components with ``solver`` and
    merge. Raises the per-component gate errors for the caller's retry loop."""
    merged = sh.coloring.values.copy()
    ledger = RoundLedger()
    comp_rounds = 0
    budget = _component_budget(b, config)
    comps = sh.components(b)
    sizes = [c.instance.n for c in comps]
    for comp in comps:
        inst = comp.instance
        if inst.n > budget:
            raise ComponentTooLarge(f"component n={inst.n} > budget {budget:.1f}")
        if inst.left == 0:
            merged[comp.right_ids] = RED
            continue
        sub_col, sub_led = solver(comp)
        merged[comp.right_ids] = sub_col.values
        comp_rounds = max(comp_rounds, sub_led.total_simulated)
        ledger.metrics.setdefault("component_sizes", sizes)
    merged[merged == UNCOLORED] = RED
    ledger.charge("residual components (parallel)", comp_rounds, comp_rounds,
                  "max over components")
    ledger.metrics["n_components"] = len(comps)
    ledger.metrics["max_component"] = max(sizes) if sizes else 0
    return TwoColoring(merged), ledger


def randomized_weak_split(b: BipartiteInstance, seed: int = 0,
                          config: SplitConfig = DEFAULT_CONFIG):
    """Shattering-based randomized solver.

    Gate: delta >= c*log2(r*log2 n). Above 2 log2 n the zero-round coloring is
    verified directly; otherwise shatter, solve residual components with the
    deterministic pipeline, merge, verify. Stochastic gate failures consume
    retries.
    """
    gate = config.randomized_gate_c * log2(max(b.r, 1) * log2(max(b.n, 4)))
    if b.delta < gate:
        raise PreconditionDelta(f"delta={b.delta} < c*log2(r*log2 n)={gate:.3f}")
    ledger = RoundLedger()
    last_err: Exception | None = None
    for attempt in range(config.retry_limit + 1):
        sub = _sub_seed(seed, attempt)
        if b.delta > 2.0 * log2(b.n):
            coloring = random_weak_split(b, sub)
            if check_weak_splitting(b, coloring):
                ledger.charge("random coloring", 0, 1, "0 rounds + 1 check")
                ledger.metrics["retries"] = attempt
                ledger.metrics["path"] = "direct"
                return coloring, ledger
            last_err = NotAWeakSplitting("random coloring failed verification")
            continue
        bp, vmap = split_heavy_left_nodes(b, b.delta)
        sh = shatter(bp, sub)
        try:
            def comp_solver(comp: Subinstance):
                inst = comp.instance
                if inst.n < 4 or inst.delta < 2.0 * log2(inst.n):
                    raise PreconditionDelta(
                        f"component delta={inst.delta} < 2*log2(n_H)="
                        f"{2.0 * log2(max(inst.n, 2)):.3f}")
                return weak_split_speedup(inst, config)

            coloring, led_res = _solve_residual(bp, sh, config, comp_solver)
        except (ComponentTooLarge, PreconditionDelta, ShrinkageViolation) as exc:
            last_err = exc
            continue
        if check_weak_splitting(b, coloring):
            ledger.charge("heavy-node split", 0, 1, "virtual split")
            ledger.charge("shatter", sh.simulated_rounds, sh.simulated_rounds, "2")
            ledger.extend(led_res)
            lrl = log2(max(b.r, 1) * log2(max(b.n, 4)))
            nominal = (b.r / max(b.delta, 1)) * lrl ** 2 \
                + lrl ** 3 * max(log2(max(lrl, 2)), 1.0) ** 1.1
            ledger.charge("shattering pipeline", 0, max(nominal, 1.0),
                          "(r/delta)*log^2(r log n)+log^3(r log n)*(loglog)^1.1")
            ledger.metrics["retries"] = attempt
            ledger.metrics["path"] = "shatter"
            ledger.metrics["residual_delta"] = sh.residual_delta
            return coloring, ledger
        last_err = NotAWeakSplitting("merged coloring failed verification")
    if isinstance(last_err, ComponentTooLarge):
        raise last_err
    raise RetryExhausted(f"randomized solver failed after "
                         f"{config.retry_limit + 1} attempts: {last_err}")


# =============================================================================
# High girth
# =============================================================================

def _shatter_tables(b: BipartiteInstance, t: float = 0.5):
    deg = b.u_degrees().astype(np.float64)
    maxd = int(deg.max()) if b.left else 1
    j = np.arange(maxd + 2, dtype=np.float64)
    a1base = np.exp(t * deg / 4.0)
    a2base = np.exp(-3.0 * t * deg / 4.0)
    emn = np.exp(-t * j)
    emp = np.exp(t * j)
    pmn = ((1.0 + math.exp(-t)) / 2.0) ** j
    pmp = ((1.0 + math.exp(t)) / 2.0) ** j
    q34 = 0.75 ** j
    return a1base, a2base, emn, emp, pmn, pmp, q34


def derandomized_shatter(b: BipartiteInstance,
                         config: SplitConfig = DEFAULT_CONFIG) -> ShatterResult:
    """Estimator-guided three-way choice scheduled by a distance-4 coloring,
    followed by the standard uncoloring rule.

    The estimator sums, per U-node, exponential-moment bounds (t=1/2) on the
    too-few/too-many colored-neighbor events and the exact no-red/no-blue
    survival products.
    """
    sched_colors, _ = power_graph_coloring(b, 4)
    v_nodes = np.arange(b.left, b.n)
    order = (schedule_order(sched_colors, v_nodes) - b.left).astype(np.int64)
    tables = _shatter_tables(b)
    colors, initial, trace = _k.condexp_shatter(
        b.u_ptr, b.u_adj, b.v_ptr, b.v_adj, order, *tables)
    return _shatter_result(b, apply_uncoloring_rule(b, colors))


def _gap_components(b: BipartiteInstance, sh: ShatterResult) -> list[Subinstance]:
    comps = sh.components(b)
    for comp in comps:
        inst = comp.instance
        if inst.left and inst.delta < 6 * inst.r:
            raise GapViolation(
                f"residual component has delta_H={inst.delta} < 6*r_H={6 * inst.r}")
    return comps


def high_girth_weak_split(b: BipartiteInstance, mode: str = "deterministic",
                          seed: int = 0,
                          config: SplitConfig = DEFAULT_CONFIG):
    """Solvers for girth >= 10: shatter (random or derandomized), check the
    residual gap delta_H >= 6 r_H, finish with the rank-collapse endgame."""
    if mode not in ("deterministic", "randomized"):
        raise ValueError(f"unknown mode {mode!r}")
    if girth(b, 10) < 10:
        raise GirthTooSmall("instance contains a cycle shorter than 10")
    ln_n = math.log(max(b.n, 2))
    if mode == "deterministic":
        need = config.girth_c * math.sqrt(ln_n)
    else:
        need = config.girth_c * math.sqrt(
            math.log(max(b.Delta * max(b.r, 1) * ln_n, 2.0)))
    if b.delta < need:
        raise PreconditionDelta(f"delta={b.delta} < gate {need:.3f}")
    if b.Delta < config.girth_cprime * math.log(max(b.r, 2)):
        raise PreconditionDelta(
            f"Delta={b.Delta} < c'*ln(r)="
            f"{config.girth_cprime * math.log(max(b.r, 2)):.3f}")

    def comp_solver(comp: Subinstance):
        return weak_split_delta_ge_6r(comp.instance, "deterministic", seed, config)

    ledger = RoundLedger()
    if mode == "deterministic":
        sh = derandomized_shatter(b, config)
        _gap_components(b, sh)
        coloring, led_res = _solve_residual(b, sh, config, comp_solver)
        ledger.charge("derandomized shatter (B^4 schedule)",
                      max(1, b.Delta ** 2 * max(b.r, 1) ** 2), 1,
                      "Delta^2*r^2")
        ledger.extend(led_res)
        ledger.metrics["unsatisfied"] = int(sh.unsatisfied.size)
        _self_verify(b, coloring)
        return coloring, ledger
    last_err: Exception | None = None
    for attempt in range(config.retry_limit + 1):
        sh = shatter(b, _sub_seed(seed, attempt))
        try:
            _gap_components(b, sh)
            coloring, led_res = _solve_residual(b, sh, config, comp_solver)
        except (GapViolation, ComponentTooLarge, PreconditionRatio,
                ShrinkageViolation) as exc:
            last_err = exc
            continue
        if check_weak_splitting(b, coloring):
            ledger.charge("shatter", sh.simulated_rounds, sh.simulated_rounds, "2")
            ledger.extend(led_res)
            ledger.metrics["retries"] = attempt
            ledger.metrics["unsatisfied"] = int(sh.unsatisfied.size)
            _self_verify(b, coloring)
            return coloring, ledger
        last_err = NotAWeakSplitting("merged coloring failed verification")
    if isinstance(last_err, GapViolation):
        raise last_err
    raise RetryExhausted(f"high-girth randomized solver failed after "
                         f"{config.retry_limit + 1} attempts: {last_err}")
