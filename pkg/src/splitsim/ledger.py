"""Round accounting.

Each phase records two independent numbers: the rounds the harness actually
simulated, and the closed-form charge (constant 1) for the subroutine it
stands in for. Neither bounds the other.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def _plain(value):
    """JSON-safe copy of a metrics value (numpy scalars/arrays to builtins)."""
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    return value


def log2(x: float) -> float:
    return math.log2(x)


def log_star(n: float) -> int:
    """Iterated base-2 logarithm: steps until the value drops to <= 1."""
    steps = 0
    x = float(n)
    while x > 1.0:
        x = math.log2(x)
        steps += 1
    return steps


def nominal_degree_split(eps: float, n: int, randomized: bool = False) -> float:
    """Closed-form round charge for one directed degree splitting call.

    Deterministic: eps^-1 * (log2 eps^-1)^1.1 * log2 n.
    Randomized:    eps^-1 * log2(eps^-1) * (log2 log2 eps^-1)^1.71 * log2 log2 n.
    """
    inv = 1.0 / eps
    li = max(log2(max(inv, 2.0)), 1.0)
    if randomized:
        lli = max(log2(max(li, 2.0)), 1.0)
        lln = max(log2(max(log2(max(n, 4)), 2.0)), 1.0)
        return max(1.0, inv * li * lli ** 1.71 * lln)
    ln = max(log2(max(n, 2)), 1.0)
    return max(1.0, inv * li ** 1.1 * ln)


@dataclass
class Phase:
    name: str
    simulated_rounds: int
    nominal_rounds: int
    formula: str


@dataclass
class RoundLedger:
    phases: list[Phase] = field(default_factory=list)
    # measured diagnostics (estimator traces, degree traces, retry counts, ...)
    metrics: dict = field(default_factory=dict)

    def charge(self, name: str, simulated: int, nominal: float, formula: str) -> None:
        if simulated < 0:
            raise ValueError("simulated rounds must be >= 0")
        self.phases.append(Phase(name, int(simulated), int(math.ceil(nominal)), formula))

    def extend(self, other: "RoundLedger", prefix: str = "") -> None:
        for ph in other.phases:
            self.phases.append(Phase(prefix + ph.name, ph.simulated_rounds,
                                     ph.nominal_rounds, ph.formula))
        for key, val in other.metrics.items():
            self.metrics.setdefault(prefix + key if prefix else key, val)

    @property
    def total_simulated(self) -> int:
        return sum(p.simulated_rounds for p in self.phases)

    @property
    def total_nominal(self) -> int:
        return sum(p.nominal_rounds for p in self.phases)

    def to_json(self) -> dict:
        return {
            "phases": [
                {
                    "name": p.name,
                    "simulated_rounds": p.simulated_rounds,
                    "nominal_rounds": p.nominal_rounds,
                    "formula": p.formula,
                }
                for p in self.phases
            ],
            "total_simulated": self.total_simulated,
            "total_nominal": self.total_nominal,
            "metrics": _plain(self.metrics),
        }
