"""Shared fixtures and independently-written brute-force oracles.

Oracles here evaluate definitions directly (adjacency dicts, BFS, exhaustive
enumeration) and never call solver or checker code paths.
"""
import itertools
from collections import deque

import numpy as np
import pytest

from splitsim.graphs import BipartiteInstance, SimGraph
from splitsim.types import BLUE, RED, UNCOLORED


# ---- plain-dict graph views -------------------------------------------------

def adj_dict(g: SimGraph) -> dict:
    adj = {i: [] for i in range(g.n)}
    for a, b in g.edges:
        adj[int(a)].append(int(b))
        adj[int(b)].append(int(a))
    return adj


def inst_adj(b: BipartiteInstance):
    u_nbrs = {u: [] for u in range(b.left)}
    v_nbrs = {v: [] for v in range(b.right)}
    for u, v in b.edges:
        u_nbrs[int(u)].append(int(v))
        v_nbrs[int(v)].append(int(u))
    return u_nbrs, v_nbrs


def bfs_dist(adj: dict, src: int) -> dict:
    dist = {src: 0}
    q = deque([src])
    while q:
        x = q.popleft()
        for y in adj[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                q.append(y)
    return dist


# ---- oracles ----------------------------------------------------------------

def oracle_girth(g: SimGraph) -> int:
    """Shortest cycle by per-edge removal + BFS; inf if acyclic."""
    adj = adj_dict(g)
    best = float("inf")
    for a, b in g.edges:
        a, b = int(a), int(b)
        adj[a].remove(b)
        adj[b].remove(a)
        dist = bfs_dist(adj, a)
        if b in dist:
            best = min(best, dist[b] + 1)
        adj[a].append(b)
        adj[b].append(a)
    return best


def oracle_weak_split_valid(b: BipartiteInstance, values) -> bool:
    """Direct Definition evaluation: every U-node sees both colors."""
    u_nbrs, _ = inst_adj(b)
    for u in range(b.left):
        cols = {int(values[v]) for v in u_nbrs[u]}
        if RED not in cols or BLUE not in cols:
            return False
    return True


def oracle_components_union_find(b: BipartiteInstance, left_set, right_set):
    """Union-find over the induced subgraph; returns frozenset of node-id
    frozensets, with V-nodes tagged by offset."""
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    for u in left_set:
        parent[("u", u)] = ("u", u)
    for v in right_set:
        parent[("v", v)] = ("v", v)
    for u, v in b.edges:
        u, v = int(u), int(v)
        if u in left_set and v in right_set:
            union(("u", u), ("v", v))
    groups = {}
    for node in parent:
        groups.setdefault(find(node), set()).add(node)
    return frozenset(frozenset(s) for s in groups.values())


def oracle_eccentricity(adj: dict, src: int) -> int:
    return max(bfs_dist(adj, src).values())


def all_two_colorings(nv: int):
    for bits in itertools.product([RED, BLUE], repeat=nv):
        yield np.array(bits, dtype=np.int8)


def brute_force_weak_split(b: BipartiteInstance):
    from splitsim.types import TwoColoring
    from splitsim.verify import check_weak_splitting

    for values in all_two_colorings(b.right):
        c = TwoColoring(values)
        if check_weak_splitting(b, c):
            return c
    return None


# ---- fixtures ---------------------------------------------------------------

@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)


def random_instance(left, right, dmin, dmax, seed):
    """Plain random instance (uncontrolled rank) for structural tests."""
    r = np.random.default_rng(seed)
    edges = set()
    for u in range(left):
        d = int(r.integers(dmin, dmax + 1))
        for v in r.choice(right, size=min(d, right), replace=False):
            edges.add((u, int(v)))
    return BipartiteInstance(left, right, np.array(sorted(edges), dtype=np.int64))
