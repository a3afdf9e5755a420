"""Directed degree splitting and the two degree-rank reduction procedures.

The orientation subroutine decomposes the (multi)graph into Eulerian circuits
after joining odd-degree nodes to a dummy node, then orients along each
circuit. That achieves discrepancy <= 1 at every node, strictly inside the
eps*d(v)+2 contract for every eps >= 0; the ledger still charges the
closed-form cost of the distributed subroutine this stands in for, so the
accounting stays comparable. eps therefore affects charges only.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import active as _k
from .errors import ShrinkageViolation
from .graphs import BipartiteInstance, SimGraph
from .ledger import RoundLedger, nominal_degree_split
from .types import EdgeOrientation


def directed_degree_split(g: SimGraph, epsilon: float,
                          randomized: bool = False):
    """Orient all edges with |in(v) - out(v)| <= 1 <= eps*deg(v)+2 everywhere.

    Returns (EdgeOrientation, RoundLedger).
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    if g.m:
        dirs = _k.euler_orient(g.n, np.ascontiguousarray(g.edges[:, 0]),
                               np.ascontiguousarray(g.edges[:, 1]))
    else:
        dirs = np.zeros(0, dtype=np.int8)
    ledger = RoundLedger()
    ledger.charge(
        "directed-degree-split", 1,
        nominal_degree_split(epsilon, max(g.n, 2), randomized),
        "eps^-1*log(eps^-1)*(loglog eps^-1)^1.71*loglog n" if randomized
        else "eps^-1*(log eps^-1)^1.1*log n")
    return EdgeOrientation(dirs), ledger


def orientation_discrepancy(g: SimGraph, o: EdgeOrientation) -> np.ndarray:
    """Signed out-minus-in per node (checker-independent convenience)."""
    bal = np.zeros(g.n, dtype=np.int64)
    if g.m:
        heads = np.where(o.dirs == 0, g.edges[:, 1], g.edges[:, 0])
        tails = np.where(o.dirs == 0, g.edges[:, 0], g.edges[:, 1])
        np.add.at(bal, tails, 1)
        np.add.at(bal, heads, -1)
    return bal


def degree_rank_reduction_1(b: BipartiteInstance, epsilon: float, k: int,
                            randomized: bool = False):
    """k rounds of: orient the bipartite graph, keep only U->V edges.

    Asserts the shrinkage bounds delta_k > ((1-eps)/2)^k*delta - 2 and
    r_k < ((1+eps)/2)^k*r + 3 whenever 0 < eps < 1/3.
    Returns (residual instance, ledger).
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    delta0, r0 = b.delta, b.r
    ledger = RoundLedger()
    delta_trace = [delta0]
    r_trace = [r0]
    cur = b
    for i in range(k):
        if cur.m == 0:
            delta_trace.append(0)
            r_trace.append(0)
            continue
        shifted = cur.edges.copy()
        shifted[:, 1] += cur.left
        dirs = _k.euler_orient(cur.n, np.ascontiguousarray(shifted[:, 0]),
                               np.ascontiguousarray(shifted[:, 1]))
        kept = cur.edges[dirs == 0]  # oriented U -> V
        cur = BipartiteInstance(cur.left, cur.right, kept)
        ledger.charge(
            f"degree-rank-reduction-1[{i}]", 1,
            nominal_degree_split(epsilon, max(b.n, 2), randomized),
            "eps^-1*(log eps^-1)^1.1*log n")
        delta_trace.append(cur.delta)
        r_trace.append(cur.r)
    ledger.metrics["delta_trace"] = delta_trace
    ledger.metrics["r_trace"] = r_trace
    if 0 < epsilon < 1 / 3 and b.left:
        lo = ((1 - epsilon) / 2) ** k * delta0 - 2
        hi = ((1 + epsilon) / 2) ** k * r0 + 3
        if not cur.delta > lo:
            raise ShrinkageViolation(
                f"delta_{k}={cur.delta} fails > ((1-eps)/2)^k*delta-2={lo:.4f}")
        if not cur.r < hi:
            raise ShrinkageViolation(
                f"r_{k}={cur.r} fails < ((1+eps)/2)^k*r+3={hi:.4f}")
    return cur, ledger


@dataclass(frozen=True)
class PairingMultigraph:
    """Multigraph over U whose edges are neighbor pairs grouped at V-nodes.

    ``corresponding[e]`` is the V-node that grouped edge e; each V-node of
    degree d contributes exactly floor(d/2) edges.
    """

    graph: SimGraph
    corresponding: np.ndarray


def build_pairing_multigraph(b: BipartiteInstance) -> PairingMultigraph:
    """Pair each V-node's neighbors (ascending U-id) as (1,2),(3,4),...;
    an odd leftover stays unpaired."""
    eu = []
    ev = []
    corr = []
    for v in range(b.right):
        nbrs = b.v_neighbors(v)
        for j in range(0, nbrs.size - 1, 2):
            eu.append(nbrs[j])
            ev.append(nbrs[j + 1])
            corr.append(v)
    if eu:
        rows = np.stack([np.array(eu, dtype=np.int64),
                         np.array(ev, dtype=np.int64)], axis=1)
        lo = rows.min(axis=1)
        hi = rows.max(axis=1)
        rows = np.stack([lo, hi], axis=1)
        order = np.lexsort((rows[:, 1], rows[:, 0]))
        rows = rows[order]
        corr_arr = np.array(corr, dtype=np.int64)[order]
    else:
        rows = np.zeros((0, 2), dtype=np.int64)
        corr_arr = np.zeros(0, dtype=np.int64)
    g = SimGraph(np.arange(b.left, dtype=np.int64), rows, multigraph=True)
    return PairingMultigraph(g, corr_arr)


def degree_rank_reduction_2(b: BipartiteInstance, epsilon: float, k: int,
                            randomized: bool = False):
    """k rounds of pairing + orientation + loser-edge deletion.

    Every V-node keeps exactly ceil(d/2) of its d edges per round, so the
    rank collapses to 1 after ceil(log2 r) rounds. Pairings are rebuilt from
    scratch on each residual. Returns (residual instance, ledger).
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    ledger = RoundLedger()
    rank_trace = [b.r]
    cur = b
    for i in range(k):
        pm = build_pairing_multigraph(cur)
        before_vdeg = cur.v_degrees()
        if pm.graph.m:
            dirs = _k.euler_orient(pm.graph.n,
                                   np.ascontiguousarray(pm.graph.edges[:, 0]),
                                   np.ascontiguousarray(pm.graph.edges[:, 1]))
            loser = np.where(dirs == 0, pm.graph.edges[:, 1], pm.graph.edges[:, 0])
            # delete the B-edge {loser endpoint, corresponding v}
            del_keys = loser * cur.right + pm.corresponding
            edge_keys = cur.edges[:, 0] * cur.right + cur.edges[:, 1]
            keep = ~np.isin(edge_keys, del_keys)
            nxt = BipartiteInstance(cur.left, cur.right, cur.edges[keep])
        else:
            nxt = cur
        after_vdeg = nxt.v_degrees()
        expected = (before_vdeg + 1) // 2
        if np.any(after_vdeg < expected):
            bad = int(np.argmax(after_vdeg < expected))
            raise ShrinkageViolation(
                f"V-node {bad} kept {int(after_vdeg[bad])} < "
                f"ceil(d/2)={int(expected[bad])} edges")
        cur = nxt
        ledger.charge(
            f"degree-rank-reduction-2[{i}]", 1,
            nominal_degree_split(epsilon, max(b.n, 2), randomized),
            "eps^-1*log(eps^-1)*(loglog eps^-1)^1.71*loglog n" if randomized
            else "eps^-1*(log eps^-1)^1.1*log n")
        rank_trace.append(cur.r)
    ledger.metrics["rank_trace"] = rank_trace
    return cur, ledger
