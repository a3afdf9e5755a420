"""Multicolor splitting: random base solvers and the constructive reductions
between multicolor splitting and weak splitting."""
from __future__ import annotations

import math

import numpy as np

from ._kernels import active as _k
from .config import DEFAULT_CONFIG, SplitConfig
from .errors import (
    NotAWeakMulticolorSplitting,
    ParamViolation,
    PreconditionDelta,
    RetryExhausted,
)
from .graphs import BipartiteInstance
from .ledger import RoundLedger, log2
from .types import MultiColoring, TwoColoring
from .verify import check_multicolor_splitting, check_weak_splitting
from .weak_split import _p2_table, _rng, _sub_seed


def choose_cprime(C: int, lam: float) -> int:
    """Working palette for the random base solver: 3 when lam >= 2/3, else
    ceil(3/lam); must not exceed C."""
    if C < 3:
        raise ParamViolation(f"C={C} < 3 (the two-color case is weak splitting)")
    cp = 3 if lam >= 2.0 / 3.0 else math.ceil(3.0 / lam)
    if cp > C:
        raise ParamViolation(f"C'={cp} > C={C} (requires lam >= 3/(C-1))")
    return cp


class MulticolorParams:
    """(C, lambda) with the derived working palette C'."""

    def __init__(self, C: int, lam: float,
                 poly_log_cap: float = 10.0 ** 6):
        if C < 2:
            raise ParamViolation(f"C={C} < 2")
        if lam < 2.0 / C:
            raise ParamViolation(f"lambda={lam} < 2/C={2.0 / C}")
        if C > poly_log_cap:
            raise ParamViolation(f"C={C} exceeds the configured cap")
        self.C = int(C)
        self.lam = float(lam)

    @property
    def cprime(self) -> int:
        return choose_cprime(self.C, self.lam)


def random_multicolor(b: BipartiteInstance, c_eff: int, seed: int = 0) -> MultiColoring:
    """I.i.d. uniform color in [0, c_eff) per V-node; zero rounds."""
    if c_eff < 1:
        raise ParamViolation(f"c_eff={c_eff} < 1")
    rng = _rng(seed)
    return MultiColoring(rng.integers(0, c_eff, size=b.right), c_eff)


def _qualifying_mask(b: BipartiteInstance, lam: float, alpha: float) -> np.ndarray:
    floor = (alpha / lam) * math.log(max(b.n, 2))
    return b.u_degrees() >= floor


def _check_on_qualifying(b: BipartiteInstance, mc: MultiColoring, C: int,
                         lam: float, qual: np.ndarray) -> bool:
    if not np.any(qual):
        return True
    keep = qual[b.edges[:, 0]] if b.m else np.zeros(0, bool)
    idx = np.flatnonzero(qual)
    remap = np.full(b.left, -1, dtype=np.int64)
    remap[idx] = np.arange(idx.size)
    edges = b.edges[keep].copy()
    edges[:, 0] = remap[edges[:, 0]]
    sub = BipartiteInstance(idx.size, b.right, edges)
    return bool(check_multicolor_splitting(sub, mc, C, lam))


def multicolor_split_base(b: BipartiteInstance, c_eff: int, lam: float,
                          seed: int = 0,
                          config: SplitConfig = DEFAULT_CONFIG):
    """Random coloring with c_eff colors, verified per the per-color cap on
    every qualifying U-node (degree >= (alpha/lam)*ln n), with retries."""
    qual = _qualifying_mask(b, lam, config.alpha)
    ledger = RoundLedger()
    for attempt in range(config.retry_limit + 1):
        mc = random_multicolor(b, c_eff, _sub_seed(seed, attempt))
        if _check_on_qualifying(b, mc, c_eff, lam, qual):
            ledger.charge("random multicolor", 0, 1, "0 rounds + 1 check")
            ledger.metrics["retries"] = attempt
            return mc, ledger
    raise RetryExhausted(
        f"multicolor base solver failed {config.retry_limit + 1} attempts")


def weak_multicolor_to_weaksplit(b: BipartiteInstance, mc: MultiColoring,
                                 config: SplitConfig = DEFAULT_CONFIG):
    """Weak splitting from a weak multicolor splitting.

    Keeps, per U-node, one edge per distinct neighbor color (lowest V-id,
    colors ascending) up to ceil(2 log2 n) edges. In the thinned instance any
    two V-nodes sharing a U-neighbor have different colors, so the color
    classes schedule the conditional-expectation greedy in O(C) phases.
    """
    if mc.values.size != b.right:
        raise NotAWeakMulticolorSplitting("coloring does not cover V")
    need = math.ceil(2.0 * log2(max(b.n, 2)))
    if b.n < 4:
        raise PreconditionDelta(f"instance has n={b.n} < 4")
    vals = mc.values
    keep_edges = []
    violators = []
    for u in range(b.left):
        nbrs = b.u_neighbors(u)
        cols = vals[nbrs]
        order = np.lexsort((nbrs, cols))
        kept = 0
        last_col = -1
        for j in order:
            if kept >= need:
                break
            if cols[j] != last_col:
                keep_edges.append((u, int(nbrs[j])))
                last_col = int(cols[j])
                kept += 1
        if kept < need:
            violators.append({"u": int(u), "distinct": int(np.unique(cols).size
                                                           if cols.size else 0),
                              "required": need})
    if violators:
        raise NotAWeakMulticolorSplitting(
            f"{len(violators)} U-nodes see fewer than {need} colors "
            f"(first: {violators[0]})")
    thin = BipartiteInstance(b.left, b.right,
                             np.array(keep_edges, dtype=np.int64).reshape(-1, 2))
    # by construction: same-colored V-nodes never share a U-neighbor in thin
    for u in range(thin.left):
        cu = vals[thin.u_neighbors(u)]
        if np.unique(cu).size != cu.size:
            raise NotAWeakMulticolorSplitting(
                f"distance-2 property failed at U-node {u}")
    order = np.lexsort((np.arange(b.right), vals)).astype(np.int64)
    p2 = _p2_table(int(thin.u_degrees().max()) if thin.left else 1,
                   config.risk_exp_clamp)
    colors, initial, trace = _k.condexp_weak_split(
        thin.u_ptr, thin.u_adj, thin.v_ptr, thin.v_adj, order, p2)
    if initial >= 1.0:
        raise PreconditionDelta(f"initial estimator total {initial} >= 1")
    coloring = TwoColoring(colors)
    verdict = check_weak_splitting(b, coloring)
    if not verdict:
        raise NotAWeakMulticolorSplitting(
            f"reduction produced an invalid weak splitting: "
            f"{verdict.violations[:3]}")
    ledger = RoundLedger()
    nclasses = int(np.unique(vals).size)
    ledger.charge("color-class phases", nclasses * 2, nclasses, "O(C)")
    ledger.metrics["estimator_initial"] = float(initial)
    ledger.metrics["kept_edges_per_u"] = need
    return coloring, ledger


def multicolor_split_iterate(b: BipartiteInstance, params: MulticolorParams,
                             solver=None,
                             config: SplitConfig = DEFAULT_CONFIG):
    """Boost a (C, lam) solver to a (C'', max(lam^i, 1/(2 log n)))-splitting.

    Per iteration every U-node splits into one virtual node per current color
    class; virtual nodes below degree (alpha/lam)*ln(n_i) are dropped; the
    solver colors the surviving instance and V-nodes append the new color to
    their running color tuple (flattened as old*C' + new).
    """
    lam = params.lam
    if lam > 0.5:
        raise ParamViolation(f"lambda={lam} > 1/2")
    n = b.n
    beta_floor = config.beta * math.log(max(n, 2)) ** 2
    if b.left and b.delta < beta_floor:
        raise ParamViolation(
            f"min U-degree {b.delta} < beta*ln^2 n = {beta_floor:.1f}")
    cp = params.cprime
    if solver is None:
        def solver(inst, c_eff, lam_, seed):
            return multicolor_split_base(inst, c_eff, lam_, seed, config)

    target = 1.0 / (2.0 * log2(max(n, 4)))
    ledger = RoundLedger()
    # palette growth sanity: C^i <= C * (2 log n)^(1/eps*) for eps* from lam<=C^-eps*
    iters = 0 if lam <= target else math.ceil(
        math.log(2.0 * log2(max(n, 4))) / math.log(1.0 / lam))
    eps_star = math.log(1.0 / lam) / math.log(max(params.C, 3))
    palette_cap = params.C * (2.0 * log2(max(n, 4))) ** (1.0 / eps_star)
    if params.C ** max(iters, 1) > palette_cap * (1.0 + 1e-9):
        raise ParamViolation(
            f"palette C^i={params.C ** iters} exceeds C*(2 log n)^(1/eps)="
            f"{palette_cap:.1f}")
    if iters == 0:
        mc, led = solver(b, cp, lam, 0)
        ledger.extend(led, "iteration-0/")
        ledger.metrics["iterations"] = 0
        ledger.metrics["lam_eff"] = max(lam, target)
        return MultiColoring(mc.values, cp), ledger

    col = np.zeros(b.right, dtype=np.int64)
    for it in range(1, iters + 1):
        # virtual node (u, x) for every color x present among u's neighbors
        ecol = col[b.edges[:, 1]]
        keys = b.edges[:, 0] * (params.C ** iters) + ecol
        uniq, inv, counts = np.unique(keys, return_inverse=True,
                                      return_counts=True)
        n_ref = b.right + uniq.size  # reference node count for the floor
        floor = (config.alpha / lam) * math.log(max(n_ref, 2))
        kept = counts >= floor
        kept_ids = np.flatnonzero(kept)
        remap = np.full(uniq.size, -1, dtype=np.int64)
        remap[kept_ids] = np.arange(kept_ids.size)
        emask = kept[inv]
        hi_edges = np.stack([remap[inv[emask]], b.edges[emask, 1]], axis=1)
        hi = BipartiteInstance(kept_ids.size, b.right, hi_edges)
        mc, led = solver(hi, cp, lam, it)
        ledger.extend(led, f"iteration-{it}/")
        col = col * cp + mc.values
        ledger.metrics[f"virtuals_iter_{it}"] = int(kept_ids.size)
    palette = cp ** iters
    out = MultiColoring(col, palette)
    ledger.metrics["iterations"] = iters
    ledger.metrics["lam_eff"] = max(lam ** iters, target)
    ledger.metrics["palette_used"] = int(np.unique(col).size)
    ledger.metrics["palette_declared"] = palette
    return out, ledger
