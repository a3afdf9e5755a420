"""Graph and bipartite-instance data model plus structural transformations.

Both containers are immutable after construction and store their edge lists in
canonical (lexicographically sorted) order, so equal inputs serialize to
identical bytes. Adjacency is kept in CSR form for the kernels.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegreeBelowDelta,
    DuplicateEdge,
    IndexOutOfRange,
    SchemaError,
)


def _csr_from_edges(n: int, tails: np.ndarray, heads: np.ndarray):
    """CSR arrays (indptr, indices) for the directed arc list tails->heads."""
    deg = np.bincount(tails, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(deg, out=indptr[1:])
    order = np.lexsort((heads, tails))
    indices = heads[order]
    return indptr, indices, order


@dataclass(frozen=True)
class SimGraph:
    """Undirected (multi)graph over explicitly named node ids.

    ``edges`` holds index pairs into ``node_ids`` with each row (a, b), a <= b,
    rows sorted lexicographically. Parallel edges (and self-loops) are allowed
    only when ``multigraph`` is set.
    """

    node_ids: np.ndarray
    edges: np.ndarray
    multigraph: bool = False
    # CSR caches, filled in __post_init__
    indptr: np.ndarray = field(init=False, repr=False, compare=False)
    indices: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ids = np.asarray(self.node_ids, dtype=np.int64)
        if ids.size and (np.unique(ids).size != ids.size or ids.min() < 0):
            raise IndexOutOfRange("node ids must be unique non-negative integers")
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        n = ids.size
        if edges.size:
            if edges.min() < 0 or edges.max() >= n:
                raise IndexOutOfRange("edge endpoint out of range")
            lo = np.minimum(edges[:, 0], edges[:, 1])
            hi = np.maximum(edges[:, 0], edges[:, 1])
            edges = np.stack([lo, hi], axis=1)
            order = np.lexsort((edges[:, 1], edges[:, 0]))
            edges = edges[order]
            if not self.multigraph:
                if np.any(lo == hi):
                    raise DuplicateEdge("self-loop in a simple graph")
                dup = np.all(edges[1:] == edges[:-1], axis=1)
                if np.any(dup):
                    raise DuplicateEdge("parallel edge in a simple graph")
        object.__setattr__(self, "node_ids", ids)
        object.__setattr__(self, "edges", edges)
        tails = np.concatenate([edges[:, 0], edges[:, 1]])
        heads = np.concatenate([edges[:, 1], edges[:, 0]])
        indptr, indices, _ = _csr_from_edges(n, tails, heads)
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)

    # ---- queries ----

    @property
    def n(self) -> int:
        return self.node_ids.size

    @property
    def m(self) -> int:
        return self.edges.shape[0]

    def degree(self, i: int) -> int:
        return int(self.indptr[i + 1] - self.indptr[i])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def min_degree(self) -> int:
        return int(self.degrees().min()) if self.n else 0

    def max_degree(self) -> int:
        return int(self.degrees().max()) if self.n else 0

    # ---- serialization ----

    def to_json(self) -> dict:
        id_edges = self.node_ids[self.edges]
        return {
            "nodes": [int(v) for v in self.node_ids],
            "edges": [[int(a), int(b)] for a, b in id_edges],
            "multigraph": bool(self.multigraph),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SimGraph":
        try:
            ids = np.array(obj["nodes"], dtype=np.int64)
            raw = np.array(obj["edges"], dtype=np.int64).reshape(-1, 2)
        except (KeyError, ValueError) as exc:
            raise SchemaError(f"bad graph JSON: {exc}") from None
        pos = {int(v): i for i, v in enumerate(ids)}
        try:
            edges = np.array([[pos[int(a)], pos[int(b)]] for a, b in raw],
                             dtype=np.int64).reshape(-1, 2)
        except KeyError as exc:
            raise SchemaError(f"edge references unknown node id {exc}") from None
        return cls(ids, edges, multigraph=bool(obj.get("multigraph", False)))


def graph_from_id_edges(edge_list, node_ids=None, multigraph: bool = False) -> SimGraph:
    """Build a SimGraph from edges given as pairs of node ids."""
    edge_list = list(edge_list)
    if node_ids is None:
        seen = sorted({v for e in edge_list for v in e})
        node_ids = seen
    ids = np.array(sorted(int(v) for v in node_ids), dtype=np.int64)
    pos = {int(v): i for i, v in enumerate(ids)}
    edges = np.array([[pos[int(a)], pos[int(b)]] for a, b in edge_list],
                     dtype=np.int64).reshape(-1, 2)
    return SimGraph(ids, edges, multigraph=multigraph)


@dataclass(frozen=True)
class BipartiteInstance:
    """Constraint side U (left), variable side V (right), edges between them.

    Cached degree summaries: delta/Delta are the min/max U-degree, r the max
    V-degree (the rank of the hypergraph view). An empty left side is flagged
    by delta = Delta = 0.
    """

    left: int
    right: int
    edges: np.ndarray
    delta: int = field(init=False, compare=False)
    Delta: int = field(init=False, compare=False)
    r: int = field(init=False, compare=False)
    u_ptr: np.ndarray = field(init=False, repr=False, compare=False)
    u_adj: np.ndarray = field(init=False, repr=False, compare=False)
    v_ptr: np.ndarray = field(init=False, repr=False, compare=False)
    v_adj: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            if edges[:, 0].min() < 0 or edges[:, 0].max() >= self.left:
                raise IndexOutOfRange("left endpoint out of range")
            if edges[:, 1].min() < 0 or edges[:, 1].max() >= self.right:
                raise IndexOutOfRange("right endpoint out of range")
            order = np.lexsort((edges[:, 1], edges[:, 0]))
            edges = edges[order]
            dup = np.all(edges[1:] == edges[:-1], axis=1)
            if np.any(dup):
                raise DuplicateEdge("duplicate bipartite edge")
        object.__setattr__(self, "edges", edges)
        u_ptr, u_adj, _ = _csr_from_edges(self.left, edges[:, 0], edges[:, 1])
        v_ptr, v_adj, _ = _csr_from_edges(self.right, edges[:, 1], edges[:, 0])
        u_deg = np.diff(u_ptr)
        v_deg = np.diff(v_ptr)
        object.__setattr__(self, "u_ptr", u_ptr)
        object.__setattr__(self, "u_adj", u_adj)
        object.__setattr__(self, "v_ptr", v_ptr)
        object.__setattr__(self, "v_adj", v_adj)
        object.__setattr__(self, "delta", int(u_deg.min()) if self.left else 0)
        object.__setattr__(self, "Delta", int(u_deg.max()) if self.left else 0)
        object.__setattr__(self, "r", int(v_deg.max()) if self.right else 0)

    # ---- queries ----

    @property
    def n(self) -> int:
        return self.left + self.right

    @property
    def m(self) -> int:
        return self.edges.shape[0]

    def u_degree(self, u: int) -> int:
        return int(self.u_ptr[u + 1] - self.u_ptr[u])

    def v_degree(self, v: int) -> int:
        return int(self.v_ptr[v + 1] - self.v_ptr[v])

    def u_degrees(self) -> np.ndarray:
        return np.diff(self.u_ptr)

    def v_degrees(self) -> np.ndarray:
        return np.diff(self.v_ptr)

    def u_neighbors(self, u: int) -> np.ndarray:
        return self.u_adj[self.u_ptr[u]:self.u_ptr[u + 1]]

    def v_neighbors(self, v: int) -> np.ndarray:
        return self.v_adj[self.v_ptr[v]:self.v_ptr[v + 1]]

    def as_graph(self) -> SimGraph:
        """Incidence view: U-nodes at indices [0, left), V-nodes shifted by left."""
        edges = self.edges.copy()
        edges[:, 1] += self.left
        return SimGraph(np.arange(self.n, dtype=np.int64), edges)

    # ---- serialization (canonical: edges sorted lexicographically) ----

    def to_json(self) -> dict:
        return {
            "left": int(self.left),
            "right": int(self.right),
            "edges": [[int(u), int(v)] for u, v in self.edges],
        }

    def to_json_str(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, obj: dict) -> "BipartiteInstance":
        try:
            return cls(int(obj["left"]), int(obj["right"]),
                       np.array(obj["edges"], dtype=np.int64).reshape(-1, 2))
        except (KeyError, ValueError, TypeError) as exc:
            raise SchemaError(f"bad instance JSON: {exc}") from None


@dataclass(frozen=True)
class VirtualNodeMap:
    """Maps each virtual U-node of a split instance back to its original."""

    orig_of_virtual: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "orig_of_virtual",
                           np.asarray(self.orig_of_virtual, dtype=np.int64))

    def virtuals_of(self, orig: int) -> np.ndarray:
        return np.flatnonzero(self.orig_of_virtual == orig)

    @property
    def n_virtual(self) -> int:
        return self.orig_of_virtual.size


# =============================================================================
# Operations
# =============================================================================

def build_bipartite(left_count: int, right_count: int, edges) -> BipartiteInstance:
    """Validated constructor from index pairs (duplicates and ranges rejected)."""
    arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                     dtype=np.int64).reshape(-1, 2)
    if left_count < 0 or right_count < 0:
        raise IndexOutOfRange("negative side size")
    return BipartiteInstance(int(left_count), int(right_count), arr)


def graph_to_weaksplit_instance(g: SimGraph) -> BipartiteInstance:
    """Two-copy encoding of a plain graph as a bipartite instance.

    Node i of g appears as constraint node i (its "left" copy) and as variable
    node i (its "right" copy); every edge {a, b} contributes (a_L, b_R) and
    (b_L, a_R). Degrees on both sides equal the original degrees.
    """
    if g.multigraph:
        raise DuplicateEdge("two-copy encoding is defined for simple graphs")
    e = g.edges
    pairs = np.concatenate([e, e[:, ::-1]], axis=0)
    return BipartiteInstance(g.n, g.n, pairs)


def split_heavy_left_nodes(b: BipartiteInstance, delta: int):
    """Split U-nodes of degree >= 2*delta so every U-degree lands in [delta, 2*delta).

    Chunking is deterministic: the neighbor list in ascending V-id order is cut
    into floor(deg/delta) contiguous chunks, with the remainder spread one per
    chunk from the front.

    Returns (instance, VirtualNodeMap).
    """
    if delta < 1:
        raise DegreeBelowDelta("delta must be >= 1")
    u_deg = b.u_degrees()
    if b.left and u_deg.min() < delta:
        bad = int(np.argmin(u_deg))
        raise DegreeBelowDelta(f"U-node {bad} has degree {u_deg[bad]} < {delta}")
    new_edges = []
    orig = []
    nxt = 0
    for u in range(b.left):
        nbrs = b.u_neighbors(u)
        d = nbrs.size
        q = d // delta
        if q <= 1:
            new_edges.append(np.stack([np.full(d, nxt, dtype=np.int64), nbrs], axis=1))
            orig.append(u)
            nxt += 1
            continue
        base, rem = divmod(d, q)
        start = 0
        for c in range(q):
            size = base + (1 if c < rem else 0)
            chunk = nbrs[start:start + size]
            new_edges.append(np.stack([np.full(size, nxt, dtype=np.int64), chunk], axis=1))
            orig.append(u)
            nxt += 1
            start += size
    edges = (np.concatenate(new_edges, axis=0) if new_edges
             else np.zeros((0, 2), dtype=np.int64))
    inst = BipartiteInstance(nxt, b.right, edges)
    return inst, VirtualNodeMap(np.array(orig, dtype=np.int64))


def girth(g, cap: int) -> int:
    """Exact girth when <= cap, else cap+1 as an "at least cap+1" sentinel.

    Accepts a SimGraph or a BipartiteInstance (via its incidence view).
    Parallel edges count as 2-cycles, self-loops as 1-cycles.
    """
    if cap < 3:
        raise ValueError("cap must be >= 3")
    if isinstance(g, BipartiteInstance):
        g = g.as_graph()
    if g.multigraph and g.m:
        if np.any(g.edges[:, 0] == g.edges[:, 1]):
            return 1
        dup = np.all(g.edges[1:] == g.edges[:-1], axis=1)
        if np.any(dup):
            return 2
    from ._kernels import active as _k
    best = _k.girth_bfs(g.indptr, g.indices, g.n, cap)
    return int(best) if best <= cap else cap + 1


@dataclass(frozen=True)
class Subinstance:
    """A connected piece of an induced subgraph, with maps back to the parent.

    ``instance`` is reindexed to [0, left) x [0, right); ``left_ids`` /
    ``right_ids`` give the parent indices. ``global_n`` carries the parent
    instance's node count for round charging; the component's own n is
    ``instance.n``.
    """

    instance: BipartiteInstance
    left_ids: np.ndarray
    right_ids: np.ndarray
    global_n: int


def connected_components(b: BipartiteInstance, left_subset=None,
                         right_subset=None) -> list[Subinstance]:
    """Maximal connected pieces of the subgraph induced by the given subsets.

    Subsets are boolean masks or index arrays; None keeps the whole side.
    Isolated nodes form singleton components.
    """
    def as_mask(subset, size):
        if subset is None:
            return np.ones(size, dtype=bool)
        subset = np.asarray(subset)
        if subset.dtype == bool:
            if subset.size != size:
                raise IndexOutOfRange("mask size mismatch")
            return subset.copy()
        mask = np.zeros(size, dtype=bool)
        if subset.size:
            if subset.min() < 0 or subset.max() >= size:
                raise IndexOutOfRange("subset index out of range")
            mask[subset] = True
        return mask

    lmask = as_mask(left_subset, b.left)
    rmask = as_mask(right_subset, b.right)
    keep = lmask[b.edges[:, 0]] & rmask[b.edges[:, 1]] if b.m else np.zeros(0, bool)
    sub_edges = b.edges[keep]

    # union-find over kept nodes; V-nodes live at offset b.left
    import scipy.sparse as sp
    from scipy.sparse.csgraph import connected_components as cc

    lidx = np.flatnonzero(lmask)
    ridx = np.flatnonzero(rmask)
    lpos = np.full(b.left, -1, dtype=np.int64)
    rpos = np.full(b.right, -1, dtype=np.int64)
    lpos[lidx] = np.arange(lidx.size)
    rpos[ridx] = np.arange(ridx.size)
    total = lidx.size + ridx.size
    if total == 0:
        return []
    rows = lpos[sub_edges[:, 0]]
    cols = rpos[sub_edges[:, 1]] + lidx.size
    adj = sp.coo_matrix((np.ones(rows.size, dtype=np.int8), (rows, cols)),
                        shape=(total, total))
    ncomp, labels = cc(adj, directed=False)

    out = []
    for cid in range(ncomp):
        members = np.flatnonzero(labels == cid)
        lmem = members[members < lidx.size]
        rmem = members[members >= lidx.size] - lidx.size
        left_ids = lidx[lmem]
        right_ids = ridx[rmem]
        lmap = np.full(b.left, -1, dtype=np.int64)
        rmap = np.full(b.right, -1, dtype=np.int64)
        lmap[left_ids] = np.arange(left_ids.size)
        rmap[right_ids] = np.arange(right_ids.size)
        if sub_edges.size:
            emask = lmap[sub_edges[:, 0]] >= 0
            emask &= rmap[sub_edges[:, 1]] >= 0
            ce = sub_edges[emask]
            ce = np.stack([lmap[ce[:, 0]], rmap[ce[:, 1]]], axis=1)
        else:
            ce = np.zeros((0, 2), dtype=np.int64)
        inst = BipartiteInstance(left_ids.size, right_ids.size, ce)
        out.append(Subinstance(inst, left_ids, right_ids, b.n))
    out.sort(key=lambda s: (int(s.left_ids[0]) if s.left_ids.size else b.left,
                            int(s.right_ids[0]) if s.right_ids.size else b.right))
    return out
