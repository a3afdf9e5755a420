"""Independent checkers for every certificate type.

Checkers are pure functions of (instance, certificate), evaluate the defining
condition directly on the edge list, and enumerate all violations. They share
no code with the solvers they audit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import IncompleteColoring
from .graphs import BipartiteInstance, SimGraph
from .types import (
    BLUE,
    RED,
    UNCOLORED,
    EdgeOrientation,
    IndependentSet,
    MultiColoring,
    Partition,
    ProperColoring,
    TwoColoring,
)


@dataclass
class Verdict:
    valid: bool
    violations: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.valid

    def to_json(self) -> dict:
        return {"valid": self.valid, "violations": self.violations}


def check_weak_splitting(b: BipartiteInstance, coloring: TwoColoring) -> Verdict:
    """Every U-node must have at least one red and one blue neighbor."""
    vals = coloring.values
    if vals.size != b.right:
        raise IncompleteColoring(f"coloring covers {vals.size} of {b.right} V-nodes")
    if np.any(vals == UNCOLORED):
        missing = np.flatnonzero(vals == UNCOLORED)
        raise IncompleteColoring(f"{missing.size} uncolored V-nodes "
                                 f"(first: {int(missing[0])})")
    has_red = np.zeros(b.left, dtype=bool)
    has_blue = np.zeros(b.left, dtype=bool)
    if b.m:
        ecol = vals[b.edges[:, 1]]
        np.logical_or.at(has_red, b.edges[:, 0], ecol == RED)
        np.logical_or.at(has_blue, b.edges[:, 0], ecol == BLUE)
    violations = []
    for u in np.flatnonzero(~(has_red & has_blue)):
        if has_red[u]:
            mono = "red"
        elif has_blue[u]:
            mono = "blue"
        else:
            mono = "empty"
        violations.append({"u": int(u), "monochromatic": mono})
    return Verdict(not violations, violations)


def check_multicolor_splitting(b: BipartiteInstance, mc: MultiColoring,
                               C: int, lam: float) -> Verdict:
    """Every U-node must have at most ceil(lam*deg(u)) neighbors per color."""
    vals = mc.values
    if vals.size != b.right:
        raise IncompleteColoring(f"coloring covers {vals.size} of {b.right} V-nodes")
    if vals.size and (vals.min() < 0 or vals.max() >= C):
        raise IncompleteColoring("color index outside [0, C)")
    violations = []
    degs = b.u_degrees()
    for u in range(b.left):
        nbr_colors = vals[b.u_neighbors(u)]
        if nbr_colors.size == 0:
            continue
        cap = math.ceil(lam * degs[u])
        cols, counts = np.unique(nbr_colors, return_counts=True)
        for c, cnt in zip(cols, counts):
            if cnt > cap:
                violations.append({"u": int(u), "color": int(c),
                                   "count": int(cnt), "cap": int(cap)})
    return Verdict(not violations, violations)


def check_weak_multicolor(b: BipartiteInstance, mc: MultiColoring,
                          degree_threshold: float,
                          color_threshold: float) -> Verdict:
    """U-nodes at or above the degree threshold must see enough distinct colors."""
    vals = mc.values
    if vals.size != b.right:
        raise IncompleteColoring(f"coloring covers {vals.size} of {b.right} V-nodes")
    violations = []
    for u in range(b.left):
        nbrs = b.u_neighbors(u)
        if nbrs.size < degree_threshold:
            continue
        distinct = int(np.unique(vals[nbrs]).size)
        if distinct < color_threshold:
            violations.append({"u": int(u), "distinct": distinct,
                               "required": math.ceil(color_threshold)})
    return Verdict(not violations, violations)


def weak_multicolor_thresholds(n: int, variant: str = "base",
                               c: float = 1.0) -> tuple[float, float]:
    """(degree_threshold, color_threshold) presets.

    "base": degree >= 2*(log2 n + 1)*ln n. "scaled": degree >=
    (2*log2 n + 1)*ln^c n. Both require 2*log2 n distinct colors.
    """
    ln = math.log(max(n, 2))
    lg = math.log2(max(n, 2))
    if variant == "base":
        return 2.0 * (lg + 1.0) * ln, 2.0 * lg
    if variant == "scaled":
        return (2.0 * lg + 1.0) * ln ** c, 2.0 * lg
    raise ValueError(f"unknown variant {variant!r}")


def check_orientation_discrepancy(g: SimGraph, o: EdgeOrientation):
    """Exact |in - out| per node; returns (per-node array, max)."""
    if o.dirs.size != g.m:
        raise IncompleteColoring(f"orientation covers {o.dirs.size} of {g.m} edges")
    bal = np.zeros(g.n, dtype=np.int64)
    if g.m:
        tails = np.where(o.dirs == 0, g.edges[:, 0], g.edges[:, 1])
        heads = np.where(o.dirs == 0, g.edges[:, 1], g.edges[:, 0])
        np.add.at(bal, tails, 1)
        np.add.at(bal, heads, -1)
    disc = np.abs(bal)
    return disc, int(disc.max()) if g.n else 0


def check_sinkless(g: SimGraph, o: EdgeOrientation) -> Verdict:
    """Every node needs at least one outgoing edge."""
    if o.dirs.size != g.m:
        raise IncompleteColoring(f"orientation covers {o.dirs.size} of {g.m} edges")
    outdeg = np.zeros(g.n, dtype=np.int64)
    if g.m:
        tails = np.where(o.dirs == 0, g.edges[:, 0], g.edges[:, 1])
        np.add.at(outdeg, tails, 1)
    sinks = np.flatnonzero(outdeg == 0)
    return Verdict(sinks.size == 0, [{"sink": int(v)} for v in sinks])


def check_proper_coloring(g: SimGraph, pc: ProperColoring) -> Verdict:
    vals = pc.values
    if vals.size != g.n:
        raise IncompleteColoring(f"coloring covers {vals.size} of {g.n} nodes")
    violations = []
    if g.m:
        same = vals[g.edges[:, 0]] == vals[g.edges[:, 1]]
        for a, b in g.edges[same]:
            violations.append({"edge": [int(a), int(b)], "color": int(vals[a])})
    return Verdict(not violations, violations)


def check_mis(g: SimGraph, s: IndependentSet) -> Verdict:
    """Independence plus maximality (no free node could still be added)."""
    mask = s.mask(g.n)
    violations = []
    if g.m:
        inside = mask[g.edges[:, 0]] & mask[g.edges[:, 1]]
        for a, b in g.edges[inside]:
            violations.append({"adjacent_members": [int(a), int(b)]})
    covered = mask.copy()
    if g.m:
        np.logical_or.at(covered, g.edges[:, 0], mask[g.edges[:, 1]])
        np.logical_or.at(covered, g.edges[:, 1], mask[g.edges[:, 0]])
    for v in np.flatnonzero(~covered):
        violations.append({"addable": int(v)})
    return Verdict(not violations, violations)


def check_uniform_split(obj, coloring, epsilon: float,
                        constrained=None) -> Verdict:
    """Per constrained node, both color counts among its neighbors must lie in
    [(1/2-eps)*d, (1/2+eps)*d].

    Accepts (SimGraph, Partition) or (BipartiteInstance, TwoColoring).
    """
    if isinstance(obj, BipartiteInstance):
        b = obj
        vals = coloring.values
        if vals.size != b.right or np.any(vals == UNCOLORED):
            raise IncompleteColoring("partition not total over V")
        n_left = b.left
        red = np.zeros(n_left, dtype=np.int64)
        blue = np.zeros(n_left, dtype=np.int64)
        if b.m:
            ecol = vals[b.edges[:, 1]]
            np.add.at(red, b.edges[:, 0], (ecol == RED).astype(np.int64))
            np.add.at(blue, b.edges[:, 0], (ecol == BLUE).astype(np.int64))
        degs = b.u_degrees()
    else:
        g = obj
        vals = coloring.values
        if vals.size != g.n or np.any(vals == UNCOLORED):
            raise IncompleteColoring("partition not total over nodes")
        n_left = g.n
        red = np.zeros(n_left, dtype=np.int64)
        blue = np.zeros(n_left, dtype=np.int64)
        if g.m:
            for a, bnode in ((0, 1), (1, 0)):
                ecol = vals[g.edges[:, bnode]]
                np.add.at(red, g.edges[:, a], (ecol == RED).astype(np.int64))
                np.add.at(blue, g.edges[:, a], (ecol == BLUE).astype(np.int64))
        degs = g.degrees()
    if constrained is None:
        constrained_idx = np.arange(n_left)
    else:
        constrained = np.asarray(constrained)
        constrained_idx = (np.flatnonzero(constrained)
                           if constrained.dtype == bool else constrained)
    violations = []
    for u in constrained_idx:
        d = int(degs[u])
        lo = (0.5 - epsilon) * d
        hi = (0.5 + epsilon) * d
        for name, cnt in (("red", int(red[u])), ("blue", int(blue[u]))):
            if cnt < lo or cnt > hi:
                violations.append({"u": int(u), "side": name, "count": cnt,
                                   "lo": lo, "hi": hi})
    return Verdict(not violations, violations)
