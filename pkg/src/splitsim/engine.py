"""Synchronous LOCAL round executor, sequential SLOCAL executor, and the
power-graph coloring used to schedule SLOCAL programs as LOCAL phases."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from ._kernels import active as _k
from .errors import (
    InvalidScheduleColoring,
    RadiusViolation,
    RoundLimitExceeded,
    UnsupportedRadius,
)
from .graphs import BipartiteInstance, SimGraph
from .ledger import RoundLedger, log_star


def node_rng(seed: int, node_id: int, rnd: int) -> np.random.Generator:
    """Counter-style per-(seed, node, round) stream; schedule independent."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=(int(seed) & (2**64 - 1),
                                                         int(node_id), int(rnd)))))


def _as_graph(g) -> SimGraph:
    return g.as_graph() if isinstance(g, BipartiteInstance) else g


class Halt:
    """Wrap a step() output value to stop the node."""

    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value


@dataclass
class NodeContext:
    node: int
    node_id: int
    neighbors: np.ndarray
    n: int
    seed: int

    def rng(self, rnd: int) -> np.random.Generator:
        return node_rng(self.seed, self.node_id, rnd)


class NodeProgram:
    """Synchronous message-passing node program.

    init(ctx) -> state. step(state, rnd, inbox, ctx) -> (outbox, result)
    where inbox/outbox map neighbor index -> message (outbox may be None for
    silence) and result is None to continue or Halt(output) to stop. A step at
    round t sees exactly the messages produced at round t-1.
    """

    def init(self, ctx: NodeContext):
        return None

    def step(self, state, rnd: int, inbox: dict, ctx: NodeContext):
        raise NotImplementedError


def run_sync(program: NodeProgram, g, seed: int = 0, max_rounds: int = 10**6):
    """Run a NodeProgram to completion; returns (outputs, ledger).

    Deterministic in (program, graph, seed). Simulated rounds = the largest
    step index any node executed, i.e., communication rounds consumed.
    """
    if max_rounds < 0:
        raise ValueError("max_rounds must be >= 0")
    graph = _as_graph(g)
    n = graph.n
    ctxs = [NodeContext(v, int(graph.node_ids[v]), graph.neighbors(v), n, seed)
            for v in range(n)]
    states = [program.init(ctxs[v]) for v in range(n)]
    outputs: dict[int, Any] = {}
    halted = np.zeros(n, dtype=bool)
    inboxes: list[dict] = [{} for _ in range(n)]
    rounds_used = 0
    for rnd in range(max_rounds + 1):
        if halted.all():
            break
        next_inboxes: list[dict] = [{} for _ in range(n)]
        for v in range(n):
            if halted[v]:
                continue
            outbox, result = program.step(states[v], rnd, inboxes[v], ctxs[v])
            if outbox:
                for u, msg in outbox.items():
                    next_inboxes[u][v] = msg
            if isinstance(result, Halt):
                outputs[v] = result.value
                halted[v] = True
            rounds_used = max(rounds_used, rnd)
        inboxes = next_inboxes
    if not halted.all():
        raise RoundLimitExceeded(f"{int((~halted).sum())} nodes still running "
                                 f"after {max_rounds} rounds")
    ledger = RoundLedger()
    ledger.charge("run_sync", rounds_used, rounds_used, "measured rounds")
    return outputs, ledger


# =============================================================================
# SLOCAL
# =============================================================================

@dataclass
class SLocalOrder:
    sequence: np.ndarray
    k: int

    def __post_init__(self):
        self.sequence = np.asarray(self.sequence, dtype=np.int64)


class SLocalView:
    """Read access to the current state of the k-hop ball around a node."""

    def __init__(self, graph: SimGraph, center: int, k: int, states: list):
        self._graph = graph
        self._k = k
        self._states = states
        self.center = center
        dist = {center: 0}
        q = deque([center])
        while q:
            x = q.popleft()
            if dist[x] >= k:
                continue
            for y in graph.neighbors(x):
                y = int(y)
                if y not in dist:
                    dist[y] = dist[x] + 1
                    q.append(y)
        self._dist = dist

    def ball(self) -> list[int]:
        return sorted(self._dist)

    def dist(self, node: int) -> int:
        if node not in self._dist:
            raise RadiusViolation(f"node {node} outside radius {self._k} "
                                  f"of {self.center}")
        return self._dist[node]

    def neighbors(self, node: int) -> list[int]:
        self.dist(node)
        return [int(y) for y in self._graph.neighbors(node)]

    def state(self, node: int):
        self.dist(node)
        return self._states[node]


class SLocalProgram:
    """Sequential program: process(node, view) -> this node's new state.

    The returned state is both the node's output and what later nodes see.
    """

    def process(self, node: int, view: SLocalView):
        raise NotImplementedError


def run_slocal(program: SLocalProgram, g, order: SLocalOrder) -> dict:
    """Process nodes in the given order; each reads only its k-hop ball.

    Replaying the same order reproduces outputs exactly.
    """
    graph = _as_graph(g)
    states: list = [None] * graph.n
    outputs: dict[int, Any] = {}
    for v in order.sequence:
        v = int(v)
        view = SLocalView(graph, v, order.k, states)
        out = program.process(v, view)
        states[v] = out
        outputs[v] = out
    return outputs


# =============================================================================
# Power-graph coloring and the SLOCAL -> LOCAL schedule
# =============================================================================

_SUPPORTED_RADII = (1, 2, 4)


def power_graph_coloring(g, k: int):
    """Greedy proper coloring of g^k; returns (colors, ledger).

    Any two nodes within distance k receive different colors; the color count
    is at most Delta(g^k)+1.
    """
    if k not in _SUPPORTED_RADII:
        raise UnsupportedRadius(f"radius {k} not supported (use one of "
                                f"{_SUPPORTED_RADII})")
    graph = _as_graph(g)
    colors = _k.greedy_power_coloring(graph.indptr, graph.indices, graph.n, k)
    ncolors = int(colors.max()) + 1 if graph.n else 0
    ledger = RoundLedger()
    ledger.charge(f"power-coloring(k={k})",
                  ncolors + log_star(max(graph.n, 2)),
                  ncolors + log_star(max(graph.n, 2)),
                  "Delta(g^k)+log*(n)")
    return colors, ledger


def check_schedule_coloring(g, k: int, colors: np.ndarray) -> None:
    graph = _as_graph(g)
    colors = np.asarray(colors, dtype=np.int64)
    bad = _k.check_power_coloring(graph.indptr, graph.indices, graph.n, k, colors)
    if bad >= 0:
        raise InvalidScheduleColoring(
            f"two nodes within distance {k} share color {int(colors[bad])} "
            f"(witness node {int(bad)})")


def schedule_order(colors: np.ndarray, subset: np.ndarray | None = None) -> np.ndarray:
    """Node order (color class ascending, id ascending) restricted to subset."""
    colors = np.asarray(colors, dtype=np.int64)
    nodes = np.arange(colors.size) if subset is None else np.asarray(subset)
    return nodes[np.lexsort((nodes, colors[nodes]))]


def slocal_to_local(program: SLocalProgram, g, k: int, colors: np.ndarray,
                    subset: np.ndarray | None = None):
    """Run an SLOCAL(k) program as C synchronous phases given a g^k coloring.

    Within a phase all nodes of one color class decide; the coloring keeps
    them pairwise farther than k apart, so the outcome equals the sequential
    run in (class, id) order. Returns (outputs, ledger).
    """
    graph = _as_graph(g)
    check_schedule_coloring(graph, k, colors)
    order = schedule_order(colors, subset)
    outputs = run_slocal(program, graph, SLocalOrder(order, k))
    used = np.asarray(colors)[order] if order.size else np.zeros(0, dtype=np.int64)
    nclasses = int(np.unique(used).size)
    ledger = RoundLedger()
    ledger.charge(f"slocal(k={k}) phases", nclasses * k, nclasses * k, "C*k")
    return outputs, ledger
