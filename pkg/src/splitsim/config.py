"""Tunable constants.

The underlying guarantees hold for "sufficiently large" constants; these are
the concrete values the harness runs with. Tests may override per call.
"""
from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class SplitConfig:
    # gate constant in the randomized solver precondition delta >= c*log2(r*log2 n)
    randomized_gate_c: float = 32.0
    # residual component budget: K * r^4 * log2(n)^6
    component_budget_k: float = 64.0
    # retry limit for randomized solvers (fresh seed substream per attempt)
    retry_limit: int = 10
    # multicolor degree-floor constants: virtual nodes kept at degree >= (alpha/lambda)*ln n,
    # iterate precondition min degree >= beta*ln^2 n
    alpha: float = 8.0
    beta: float = 16.0
    # balanced splitting degree floor: constrained degree >= c_split*ln(n)/eps^2
    c_split: float = 4.0
    # high-girth gates: delta >= girth_c*sqrt(ln n) (det) or sqrt(ln(Delta*r*ln n)) (rand),
    # Delta >= girth_cprime*ln r
    girth_c: float = 4.0
    girth_cprime: float = 4.0
    # exponent clamp for 2^-k risk terms (avoids float64 underflow; still pessimistic)
    risk_exp_clamp: int = 400
    # heavy-elimination iteration budget: K * log2(n)^4
    mis_iteration_budget_k: float = 1.0

    def with_(self, **kw) -> "SplitConfig":
        return replace(self, **kw)


DEFAULT_CONFIG = SplitConfig()
