"""Seed-deterministic instance generators for tests and experiments.

Every generator either returns an object satisfying its declared constraints
or raises InfeasibleParams; nothing is silently clamped.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import InfeasibleParams
from .graphs import BipartiteInstance, SimGraph, build_bipartite

_SEED_MASK = 2**64 - 1


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, (tuple, list)):
        entropy = tuple(int(s) & _SEED_MASK for s in seed)
    else:
        entropy = int(seed) & _SEED_MASK
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def random_bipartite(left: int, right: int, delta: int, r_max: int,
                     seed: int = 0, dmax: int | None = None) -> BipartiteInstance:
    """Random instance with every U-degree in [delta, dmax] and rank <= r_max.

    Deals V-slots (each V-node replicated r_max times) to U-nodes; a U-node
    retries a bounded number of times to collect distinct partners.
    """
    if left < 0 or right < 0 or delta < 0:
        raise InfeasibleParams("negative parameter")
    dmax = delta if dmax is None else dmax
    if dmax < delta:
        raise InfeasibleParams("dmax < delta")
    if delta > right:
        raise InfeasibleParams(f"delta={delta} > right={right}")
    rng = _rng(seed)
    degs = rng.integers(delta, dmax + 1, size=left)
    total = int(degs.sum())
    if total > right * r_max:
        raise InfeasibleParams(
            f"sum of U-degrees {total} exceeds right*r_max={right * r_max}")
    # deal from a shuffled deck of V-slots (each V-node r_max times); swap
    # duplicate slots with random later positions to keep partners distinct
    deck = np.repeat(np.arange(right, dtype=np.int64), r_max)
    rng.shuffle(deck)
    pos = 0
    tails = np.repeat(np.arange(left, dtype=np.int64), degs)
    heads = np.empty(total, dtype=np.int64)
    out = 0
    for u in range(left):
        need = int(degs[u])
        hand = deck[pos:pos + need]
        tries = 0
        while np.unique(hand).size < need:
            tries += 1
            if tries > 200 or pos + need >= deck.size:
                raise InfeasibleParams(
                    f"U-node {u} cannot find {need} distinct partners")
            seen = set()
            for j in range(need):
                if int(hand[j]) in seen:
                    swap = int(rng.integers(pos + need, deck.size))
                    deck[pos + j], deck[swap] = deck[swap], deck[pos + j]
                else:
                    seen.add(int(hand[j]))
            hand = deck[pos:pos + need]
        heads[out:out + need] = hand
        out += need
        pos += need
    return build_bipartite(left, right, np.stack([tails, heads], axis=1))


def left_regular(left: int, right: int, d: int, seed: int = 0,
                 r_max: int | None = None) -> BipartiteInstance:
    """Every U-node has degree exactly d; rank <= r_max when given."""
    if r_max is None:
        r_max = max(1, math.ceil(left * d / max(right, 1)) + 2)
    return random_bipartite(left, right, d, r_max, seed=seed, dmax=d)


def bipartite_tree(depth: int, u_deg: int, v_deg: int) -> BipartiteInstance:
    """Alternating U/V tree with all leaves on the V side.

    Every U-node has degree exactly u_deg, internal V-nodes degree v_deg,
    V-leaves degree 1. Acyclic, so the girth sentinel exceeds any cap.
    """
    if depth < 1 or u_deg < 1 or v_deg < 1:
        raise InfeasibleParams("depth, u_deg, v_deg must be >= 1")
    edges = []
    u_count = 1
    v_count = 0
    # frontier of U-nodes needing (u_deg - children_so_far) more V children
    frontier_u = [(0, u_deg)]  # root wants u_deg children
    for level in range(depth):
        last = level == depth - 1
        new_frontier = []
        for u, want in frontier_u:
            for _ in range(want):
                v = v_count
                v_count += 1
                edges.append((u, v))
                if not last:
                    for _ in range(v_deg - 1):
                        nu = u_count
                        u_count += 1
                        edges.append((nu, v))
                        new_frontier.append((nu, u_deg - 1))
        frontier_u = new_frontier
        if not frontier_u and not last:
            break
    return build_bipartite(u_count, v_count, edges)


def min_degree_graph(n: int, delta_g: int, seed: int = 0) -> SimGraph:
    """Random simple graph with minimum degree >= delta_g."""
    if delta_g >= n:
        raise InfeasibleParams(f"delta_g={delta_g} needs n > delta_g, got n={n}")
    rng = _rng(seed)
    edge_set = set()
    for v in range(n):
        others = np.delete(np.arange(n), v)
        for u in rng.choice(others, size=delta_g, replace=False):
            edge_set.add((min(v, int(u)), max(v, int(u))))
    edges = np.array(sorted(edge_set), dtype=np.int64)
    g = SimGraph(np.arange(n, dtype=np.int64), edges)
    if g.min_degree() < delta_g:
        raise InfeasibleParams("generation failed to reach the degree floor")
    return g


def complete_graph(n: int) -> SimGraph:
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return SimGraph(np.arange(n, dtype=np.int64),
                    np.array(edges, dtype=np.int64).reshape(-1, 2))


def grid_graph(rows: int, cols: int) -> SimGraph:
    edges = []
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            if j + 1 < cols:
                edges.append((v, v + 1))
            if i + 1 < rows:
                edges.append((v, v + cols))
    return SimGraph(np.arange(rows * cols, dtype=np.int64),
                    np.array(edges, dtype=np.int64).reshape(-1, 2))


def gnp_graph(n: int, p: float, seed: int = 0) -> SimGraph:
    """Erdos-Renyi G(n, p)."""
    rng = _rng(seed)
    iu = np.triu_indices(n, k=1)
    mask = rng.random(iu[0].size) < p
    edges = np.stack([iu[0][mask], iu[1][mask]], axis=1).astype(np.int64)
    return SimGraph(np.arange(n, dtype=np.int64), edges)


def degree_bounded_graph(n: int, target_deg: int, seed: int = 0) -> SimGraph:
    """Random graph with all degrees <= target_deg and most of them near it."""
    rng = _rng(seed)
    deg = np.zeros(n, dtype=np.int64)
    edge_set = set()
    order = rng.permutation(n)
    for v in order:
        tries = 0
        while deg[v] < target_deg and tries < 4 * target_deg:
            u = int(rng.integers(0, n))
            tries += 1
            if u == v or deg[u] >= target_deg:
                continue
            key = (min(u, v), max(u, v))
            if key in edge_set:
                continue
            edge_set.add(key)
            deg[u] += 1
            deg[v] += 1
    edges = np.array(sorted(edge_set), dtype=np.int64).reshape(-1, 2)
    return SimGraph(np.arange(n, dtype=np.int64), edges)


_KINDS = {
    "random-bipartite": random_bipartite,
    "left-regular": left_regular,
    "bipartite-tree": bipartite_tree,
    "min-degree-graph": min_degree_graph,
    "complete": complete_graph,
    "grid": grid_graph,
    "gnp": gnp_graph,
    "degree-bounded": degree_bounded_graph,
}


def generate(kind: str, params: dict, seed: int = 0):
    """Dispatch by kind; seed is forwarded to generators that accept one."""
    if kind not in _KINDS:
        raise InfeasibleParams(f"unknown generator kind {kind!r}; "
                               f"choose from {sorted(_KINDS)}")
    fn = _KINDS[kind]
    import inspect

    kwargs = dict(params)
    if "seed" in inspect.signature(fn).parameters:
        kwargs.setdefault("seed", seed)
    return fn(**kwargs)
