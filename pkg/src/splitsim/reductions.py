"""Parameter-preserving reductions: weak splitting -> sinkless orientation,
balanced splitting -> vertex coloring, and balanced splitting -> MIS."""
from __future__ import annotations

import math

import numpy as np

from ._kernels import active as _k
from .config import DEFAULT_CONFIG, SplitConfig
from .engine import power_graph_coloring, schedule_order
from .errors import (
    EstimatorOverflow,
    IterationBudgetExceeded,
    MinDegreeTooSmall,
    NotAWeakSplitting,
    PreconditionDegree,
)
from .graphs import BipartiteInstance, SimGraph
from .ledger import RoundLedger, log2
from .types import (
    BLUE,
    RED,
    EdgeOrientation,
    IndependentSet,
    ProperColoring,
    TwoColoring,
)
from .verify import (
    check_mis,
    check_proper_coloring,
    check_sinkless,
    check_uniform_split,
    check_weak_splitting,
)


# =============================================================================
# Sinkless orientation
# =============================================================================

def sinkless_instance(g: SimGraph) -> BipartiteInstance:
    """Weak-splitting instance whose solutions orient g sinklessly.

    Left nodes are the nodes of g, right nodes its edges. A node with at least
    half of its neighbors carrying larger ids joins all its larger-id edges,
    otherwise all its smaller-id edges. Rank <= 2, min left degree >= 3.
    """
    if g.min_degree() < 5:
        raise MinDegreeTooSmall(
            f"minimum degree {g.min_degree()} < 5")
    ids = g.node_ids
    pairs = []
    for i in range(g.n):
        nbrs = g.neighbors(i)
        larger = ids[nbrs] > ids[i]
        up = int(larger.sum()) * 2 >= nbrs.size
        pairs.append(up)
    edges = []
    for e in range(g.m):
        a, b = g.edges[e]
        for x, y in ((a, b), (b, a)):
            if pairs[x] and ids[y] > ids[x]:
                edges.append((int(x), e))
            elif not pairs[x] and ids[y] < ids[x]:
                edges.append((int(x), e))
    inst = BipartiteInstance(g.n, g.m, np.array(edges, dtype=np.int64))
    assert inst.r <= 2
    assert inst.delta >= math.ceil(g.min_degree() / 2) >= 3
    return inst


def splitting_to_orientation(g: SimGraph, inst: BipartiteInstance,
                             coloring: TwoColoring) -> EdgeOrientation:
    """Red edge: smaller id -> larger id. Blue edge: the other way.

    Requires a valid weak splitting of the sinkless instance; the result is
    verified sinkless before returning.
    """
    verdict = check_weak_splitting(inst, coloring)
    if not verdict:
        raise NotAWeakSplitting(
            f"input coloring is not a weak splitting: {verdict.violations[:3]}")
    ids = g.node_ids
    a_ids = ids[g.edges[:, 0]]
    b_ids = ids[g.edges[:, 1]]
    red = coloring.values == RED
    # dirs==0 means edges[e] oriented a -> b
    dirs = np.where(red, np.where(a_ids < b_ids, 0, 1),
                    np.where(a_ids > b_ids, 0, 1)).astype(np.int8)
    o = EdgeOrientation(dirs)
    if not check_sinkless(g, o):
        raise NotAWeakSplitting("orientation has a sink despite valid splitting")
    return o


# =============================================================================
# Clique padding gadget
# =============================================================================

def pad_to_uniform(g: SimGraph, delta: int):
    """Attach a delta-clique to every node below degree delta and wire
    delta - deg(v) clique members to it; returns (graph, gadget_mask)."""
    if delta < max(1, g.max_degree() / 2):
        raise ValueError(f"delta={delta} < max(1, Delta/2)="
                         f"{max(1, g.max_degree() / 2)}")
    ids = list(int(v) for v in g.node_ids)
    next_id = (max(ids) + 1) if ids else 0
    edges = [(int(a), int(b)) for a, b in g.node_ids[g.edges]]
    gadget_ids = []
    for i in range(g.n):
        missing = delta - g.degree(i)
        if missing <= 0:
            continue
        clique = list(range(next_id, next_id + delta))
        next_id += delta
        gadget_ids.extend(clique)
        for j in range(delta):
            for l in range(j + 1, delta):
                edges.append((clique[j], clique[l]))
        for j in range(missing):
            edges.append((clique[j], int(g.node_ids[i])))
    all_ids = np.array(ids + gadget_ids, dtype=np.int64)
    pos = {int(v): k for k, v in enumerate(all_ids)}
    idx_edges = np.array([[pos[a], pos[b]] for a, b in edges], dtype=np.int64)
    padded = SimGraph(all_ids, idx_edges)
    mask = np.zeros(padded.n, dtype=bool)
    mask[len(ids):] = True
    return padded, mask


# =============================================================================
# Balanced (strong) splitting
# =============================================================================

def strong_split_bipartite(b: BipartiteInstance, epsilon: float,
                           constrained=None, degree_floor: float | None = None,
                           config: SplitConfig = DEFAULT_CONFIG):
    """Red/blue coloring of V with every constrained U-node's red and blue
    counts inside [(1/2-eps)d, (1/2+eps)d].

    Conditional expectations on the exact binomial tail probabilities,
    scheduled by a distance-2 coloring. The initial estimator total must be
    below 1 (EstimatorOverflow otherwise); the greedy then certifies every
    constrained node.
    """
    if not 0 < epsilon:
        raise ValueError("epsilon must be > 0")
    degs = b.u_degrees()
    if constrained is None:
        cmask = np.ones(b.left, dtype=bool)
    else:
        constrained = np.asarray(constrained)
        if constrained.dtype == bool:
            cmask = constrained.copy()
        else:
            cmask = np.zeros(b.left, dtype=bool)
            cmask[constrained] = True
    floor = (config.c_split * math.log(max(b.n, 2)) / epsilon ** 2
             if degree_floor is None else degree_floor)
    low = cmask & (degs < floor)
    if np.any(low):
        u = int(np.flatnonzero(low)[0])
        raise PreconditionDegree(
            f"constrained U-node {u} has degree {int(degs[u])} < floor "
            f"{floor:.1f}")
    lo = np.ceil((0.5 - epsilon) * degs - 1e-9).astype(np.int64)
    hi = np.floor((0.5 + epsilon) * degs + 1e-9).astype(np.int64)
    np.clip(lo, 0, None, out=lo)
    sched_colors, led_pc = power_graph_coloring(b, 2)
    v_nodes = np.arange(b.left, b.n)
    order = (schedule_order(sched_colors, v_nodes) - b.left).astype(np.int64)
    p2n = np.ldexp(1.0, -np.arange(int(degs.max()) + 2 if b.left else 2))
    colors, initial, trace = _k.condexp_strong_split(
        b.u_ptr, b.u_adj, b.v_ptr, b.v_adj, order, lo, hi,
        cmask.astype(np.uint8), p2n)
    if initial >= 1.0:
        raise EstimatorOverflow(
            f"initial estimator total {initial:.4f} >= 1 "
            f"({int(cmask.sum())} constrained nodes)")
    coloring = TwoColoring(colors)
    verdict = check_uniform_split(b, coloring, epsilon, cmask)
    if not verdict:
        raise EstimatorOverflow(
            f"balance violated despite certificate: {verdict.violations[:3]}")
    ledger = RoundLedger()
    ledger.extend(led_pc)
    nclasses = int(np.unique(sched_colors[v_nodes]).size) if v_nodes.size else 0
    ledger.charge("balanced cond-exp decisions", nclasses * 2,
                  max(1, nclasses * 2), "C*k")
    ledger.metrics["estimator_initial"] = float(initial)
    ledger.metrics["estimator_trace"] = trace
    return coloring, ledger


def _graph_split_instance(g: SimGraph) -> BipartiteInstance:
    """Constraint node and variable node per graph node; constraints see the
    variables of their graph neighbors."""
    e = g.edges
    pairs = np.concatenate([e, e[:, ::-1]], axis=0)
    return BipartiteInstance(g.n, g.n, pairs)


def _induced(g: SimGraph, keep: np.ndarray) -> tuple[SimGraph, np.ndarray]:
    """Induced subgraph on the kept node mask; returns (graph, original indices)."""
    idx = np.flatnonzero(keep)
    remap = np.full(g.n, -1, dtype=np.int64)
    remap[idx] = np.arange(idx.size)
    if g.m:
        emask = keep[g.edges[:, 0]] & keep[g.edges[:, 1]]
        edges = remap[g.edges[emask]]
    else:
        edges = np.zeros((0, 2), dtype=np.int64)
    return SimGraph(g.node_ids[idx], edges), idx


# =============================================================================
# Vertex coloring via repeated splitting
# =============================================================================

def greedy_base_coloring(g: SimGraph) -> ProperColoring:
    """Greedy (Delta+1) coloring in ascending node order."""
    if g.n == 0:
        return ProperColoring(np.zeros(0, dtype=np.int64), 0)
    order = np.arange(g.n, dtype=np.int64)
    colors = _k.greedy_coloring(g.indptr, g.indices, g.n, order)
    pc = ProperColoring(colors, int(colors.max()) + 1)
    assert check_proper_coloring(g, pc)
    assert pc.palette <= g.max_degree() + 1
    return pc


def coloring_via_splitting(g: SimGraph, epsilon: float, base_coloring=None,
                           levels: int | None = None,
                           config: SplitConfig = DEFAULT_CONFIG):
    """Split the graph `levels` times into balanced halves, then color the
    leaf subgraphs greedily with disjoint palettes.

    Nodes with degree >= Delta(leaf)/2 are constrained in each split, so the
    maximum degree drops by a factor (1/2+eps) per level. Palette size is at
    most 2^r * (Delta*+1) for measured leaf degree Delta*.
    """
    base = greedy_base_coloring if base_coloring is None else base_coloring
    if levels is None:
        levels = max(0, int(math.floor(log2(max(g.max_degree(), 2))
                                       - log2(max(log2(max(g.n, 4)), 2)))))
    ledger = RoundLedger()
    leaves: list[tuple[SimGraph, np.ndarray]] = [(g, np.arange(g.n))]
    depth = 0
    for level in range(levels):
        nxt: list[tuple[SimGraph, np.ndarray]] = []
        split_any = False
        for gl, gidx in leaves:
            dmax = gl.max_degree()
            if gl.n == 0 or dmax < 2:
                nxt.append((gl, gidx))
                continue
            inst = _graph_split_instance(gl)
            cmask = gl.degrees() >= dmax / 2
            coloring, led = strong_split_bipartite(
                inst, epsilon, constrained=cmask, degree_floor=0.0,
                config=config)
            ledger.extend(led, f"level-{level}/")
            red_mask = coloring.values == RED
            g_r, idx_r = _induced(gl, red_mask)
            g_b, idx_b = _induced(gl, ~red_mask)
            nxt.append((g_r, gidx[idx_r]))
            nxt.append((g_b, gidx[idx_b]))
            split_any = True
        leaves = nxt
        if split_any:
            depth += 1
    colors = np.full(g.n, -1, dtype=np.int64)
    offset = 0
    delta_star = 0
    for gl, gidx in leaves:
        if gl.n == 0:
            continue
        pc = base(gl)
        colors[gidx] = pc.values + offset
        offset += pc.palette
        delta_star = max(delta_star, gl.max_degree())
    out = ProperColoring(colors, offset)
    cap = 2 ** depth * (delta_star + 1)
    assert out.palette <= cap, f"palette {out.palette} > 2^r*(Delta*+1) = {cap}"
    verdict = check_proper_coloring(g, out)
    if not verdict:
        raise NotAWeakSplitting(f"coloring reduction produced an improper "
                                f"coloring: {verdict.violations[:3]}")
    ledger.charge("leaf greedy base", 1,
                  max(1.0, log2(max(g.n, 2)) ** 3), "poly(log n)")
    ledger.metrics["depth"] = depth
    ledger.metrics["delta_star"] = delta_star
    ledger.metrics["palette"] = out.palette
    ledger.metrics["palette_cap"] = cap
    ledger.metrics["leaves"] = len(leaves)
    return out, ledger


# =============================================================================
# MIS via repeated splitting
# =============================================================================

def greedy_mis(g: SimGraph) -> IndependentSet:
    """Greedy maximal independent set; size at least n/(Delta+1)."""
    if g.n == 0:
        return IndependentSet(np.zeros(0, dtype=np.int64))
    order = np.arange(g.n, dtype=np.int64)
    mask = _k.greedy_mis(g.indptr, g.indices, g.n, order)
    out = IndependentSet(np.flatnonzero(mask))
    assert check_mis(g, out)
    assert out.members.size >= g.n / (g.max_degree() + 1)
    return out


def _adaptive_floor(active_degs: np.ndarray, epsilon: float,
                    hard_floor: float) -> float:
    """Smallest constrained-degree floor keeping the Hoeffding failure budget
    below 1/2 (so the balanced-split estimator stays below 1)."""
    cand = np.unique(active_degs)
    cand = cand[cand >= hard_floor]
    for f in cand:
        sel = active_degs[active_degs >= f].astype(np.float64)
        budget = float(np.sum(2.0 * np.exp(-2.0 * epsilon ** 2 * sel)))
        if budget < 0.5:
            return float(f)
    return float("inf")


def mis_via_splitting(g: SimGraph, epsilon: float = 0.2,
                      config: SplitConfig = DEFAULT_CONFIG):
    """MIS by repeated heavy-node elimination.

    Outer loop halves the maximum degree; each inner iteration isolates the
    heavy nodes plus neighbors, thins the active set with balanced splits
    (blue nodes and nodes with too few active red neighbors go passive) until
    active degrees fall below 4 log n, takes a greedy MIS there, and removes
    it with its neighborhood. The polylogarithmic-degree remainder is finished
    greedily.
    """
    n0 = max(g.n, 2)
    logn = log2(n0)
    base_threshold = max(8.0, 4.0 * logn)
    budget = config.mis_iteration_budget_k * logn ** 4
    ledger = RoundLedger()
    alive = np.ones(g.n, dtype=bool)
    chosen = np.zeros(g.n, dtype=bool)
    coverage_fractions = []
    outer_steps = 0

    def residual_graph():
        return _induced(g, alive)

    while True:
        gr, gr_idx = residual_graph()
        if gr.n == 0:
            break
        dmax = gr.max_degree()
        if dmax <= base_threshold:
            break
        outer_steps += 1
        inner = 0
        while True:
            gr, gr_idx = residual_graph()
            if gr.n == 0:
                break
            degs = gr.degrees()
            heavy = degs >= dmax / 2
            if not np.any(heavy):
                break
            inner += 1
            if inner > budget:
                raise IterationBudgetExceeded(
                    f"heavy elimination exceeded {budget:.0f} iterations")
            in_gprime = heavy.copy()
            if gr.m:
                hedge = heavy[gr.edges[:, 0]] | heavy[gr.edges[:, 1]]
                in_gprime[gr.edges[hedge, 0]] = True
                in_gprime[gr.edges[hedge, 1]] = True
            active = in_gprime.copy()
            max_split_rounds = math.ceil(2.0 * log2(max(dmax, 2)))
            for _ in range(max_split_rounds):
                act_idx = np.flatnonzero(active)
                ga, _ = _induced(gr, active)
                if ga.n == 0 or ga.max_degree() < 4.0 * logn:
                    break
                adeg = ga.degrees()
                floor = _adaptive_floor(adeg, epsilon, 4.0 * logn)
                cmask = adeg >= floor
                if not np.any(cmask):
                    break
                inst = _graph_split_instance(ga)
                coloring, led = strong_split_bipartite(
                    inst, epsilon, constrained=cmask, degree_floor=0.0,
                    config=config)
                red = coloring.values == RED
                # blue nodes go passive
                active[act_idx[~red]] = False
                # then: fewer than log n active (red) neighbors -> passive
                ga2_mask = np.zeros(gr.n, dtype=bool)
                ga2_mask[act_idx[red]] = True
                red_deg = np.zeros(gr.n, dtype=np.int64)
                if gr.m:
                    both = ga2_mask[gr.edges[:, 0]] & ga2_mask[gr.edges[:, 1]]
                    np.add.at(red_deg, gr.edges[both, 0], 1)
                    np.add.at(red_deg, gr.edges[both, 1], 1)
                few = ga2_mask & (red_deg < logn)
                active[few] = False
            gstar, star_idx = _induced(gr, active)
            mask_star = (_k.greedy_mis(gstar.indptr, gstar.indices, gstar.n,
                                       np.arange(gstar.n, dtype=np.int64))
                         if gstar.n else np.zeros(0, dtype=bool))
            selected_local = star_idx[np.flatnonzero(mask_star)]
            covered = np.zeros(gr.n, dtype=bool)
            covered[selected_local] = True
            if gr.m:
                smask = covered.copy()
                covered[gr.edges[smask[gr.edges[:, 1]], 0]] = True
                covered[gr.edges[smask[gr.edges[:, 0]], 1]] = True
            n_heavy = int(heavy.sum())
            frac = float((heavy & covered).sum()) / n_heavy
            if (heavy & covered).sum() == 0:
                # forced progress: greedy MIS on G' minus the covered closure
                fb_mask = in_gprime & ~covered
                gfb, fb_idx = _induced(gr, fb_mask)
                if gfb.n:
                    mfb = _k.greedy_mis(gfb.indptr, gfb.indices, gfb.n,
                                        np.arange(gfb.n, dtype=np.int64))
                    selected_local = np.concatenate(
                        [selected_local, fb_idx[np.flatnonzero(mfb)]])
                    covered[selected_local] = True
                    if gr.m:
                        smask = np.zeros(gr.n, dtype=bool)
                        smask[selected_local] = True
                        covered[gr.edges[smask[gr.edges[:, 1]], 0]] = True
                        covered[gr.edges[smask[gr.edges[:, 0]], 1]] = True
                frac = float((heavy & covered).sum()) / n_heavy
            coverage_fractions.append(frac)
            chosen[gr_idx[selected_local]] = True
            alive[gr_idx[covered]] = False
        ledger.charge(f"heavy-elimination (Delta={dmax})", inner,
                      max(1.0, logn ** 4 * log2(max(dmax, 2))),
                      "log^4 n * log Delta splits")
    gr, gr_idx = residual_graph()
    if gr.n:
        mask = _k.greedy_mis(gr.indptr, gr.indices, gr.n,
                             np.arange(gr.n, dtype=np.int64))
        chosen[gr_idx[np.flatnonzero(mask)]] = True
    out = IndependentSet(np.flatnonzero(chosen))
    verdict = check_mis(g, out)
    if not verdict:
        raise NotAWeakSplitting(f"MIS reduction produced an invalid set: "
                                f"{verdict.violations[:3]}")
    ledger.charge("polylog-degree remainder greedy", 1,
                  max(1.0, logn ** 3), "poly(log n)")
    ledger.metrics["coverage_fractions"] = coverage_fractions
    ledger.metrics["outer_steps"] = outer_steps
    return out, ledger
