"""Certificate objects produced by solvers and consumed by checkers."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SchemaError

UNCOLORED: int = 0
RED: int = 1
BLUE: int = 2

_COLOR_NAMES = {RED: "red", BLUE: "blue"}
_COLOR_VALUES = {"red": RED, "blue": BLUE, None: UNCOLORED}


@dataclass
class TwoColoring:
    """Red/blue/uncolored assignment to the right-hand (variable) side."""

    values: np.ndarray  # int8, one entry per V-node

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int8)

    @classmethod
    def uncolored(cls, n: int) -> "TwoColoring":
        return cls(np.zeros(n, dtype=np.int8))

    @property
    def complete(self) -> bool:
        return bool(np.all(self.values != UNCOLORED))

    def copy(self) -> "TwoColoring":
        return TwoColoring(self.values.copy())

    def counts(self) -> dict:
        return {
            "red": int(np.count_nonzero(self.values == RED)),
            "blue": int(np.count_nonzero(self.values == BLUE)),
            "uncolored": int(np.count_nonzero(self.values == UNCOLORED)),
        }

    def to_json(self) -> dict:
        return {
            "type": "two-coloring",
            "values": [_COLOR_NAMES.get(int(v)) for v in self.values],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TwoColoring":
        if obj.get("type") != "two-coloring":
            raise SchemaError("expected certificate type 'two-coloring'")
        try:
            vals = [_COLOR_VALUES[v] for v in obj["values"]]
        except KeyError as exc:
            raise SchemaError(f"bad two-coloring value: {exc}") from None
        return cls(np.array(vals, dtype=np.int8))


@dataclass
class MultiColoring:
    """Color index in [0, palette) per V-node."""

    values: np.ndarray
    palette: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int64)

    def to_json(self) -> dict:
        return {
            "type": "multicoloring",
            "palette": int(self.palette),
            "values": [int(v) for v in self.values],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MultiColoring":
        if obj.get("type") != "multicoloring":
            raise SchemaError("expected certificate type 'multicoloring'")
        return cls(np.array(obj["values"], dtype=np.int64), int(obj["palette"]))


@dataclass
class EdgeOrientation:
    """Per-edge direction, aligned with the graph's canonical edge list.

    dirs[i] == 0 orients edges[i] as (a -> b); 1 orients (b -> a).
    """

    dirs: np.ndarray

    def __post_init__(self):
        self.dirs = np.asarray(self.dirs, dtype=np.int8)

    def to_json(self) -> dict:
        return {"type": "orientation", "values": [int(d) for d in self.dirs]}

    @classmethod
    def from_json(cls, obj: dict) -> "EdgeOrientation":
        if obj.get("type") != "orientation":
            raise SchemaError("expected certificate type 'orientation'")
        return cls(np.array(obj["values"], dtype=np.int8))


@dataclass
class ProperColoring:
    """Positive proper vertex coloring of a plain graph."""

    values: np.ndarray
    palette: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int64)

    def to_json(self) -> dict:
        return {
            "type": "coloring",
            "palette": int(self.palette),
            "values": [int(v) for v in self.values],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ProperColoring":
        if obj.get("type") != "coloring":
            raise SchemaError("expected certificate type 'coloring'")
        return cls(np.array(obj["values"], dtype=np.int64), int(obj["palette"]))


@dataclass
class IndependentSet:
    """Node-index subset of a plain graph."""

    members: np.ndarray

    def __post_init__(self):
        self.members = np.unique(np.asarray(self.members, dtype=np.int64))

    def mask(self, n: int) -> np.ndarray:
        m = np.zeros(n, dtype=bool)
        m[self.members] = True
        return m

    def to_json(self) -> dict:
        return {"type": "mis", "values": [int(v) for v in self.members]}

    @classmethod
    def from_json(cls, obj: dict) -> "IndependentSet":
        if obj.get("type") != "mis":
            raise SchemaError("expected certificate type 'mis'")
        return cls(np.array(obj["values"], dtype=np.int64))


@dataclass
class Partition:
    """Total red/blue split of a plain graph's nodes."""

    values: np.ndarray  # RED or BLUE per node

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int8)

    def to_json(self) -> dict:
        return {
            "type": "partition",
            "values": [_COLOR_NAMES[int(v)] for v in self.values],
        }


def certificate_from_json(obj: dict):
    kinds = {
        "two-coloring": TwoColoring,
        "multicoloring": MultiColoring,
        "orientation": EdgeOrientation,
        "coloring": ProperColoring,
        "mis": IndependentSet,
    }
    kind = obj.get("type")
    if kind not in kinds:
        raise SchemaError(f"unknown certificate type: {kind!r}")
    return kinds[kind].from_json(obj)
