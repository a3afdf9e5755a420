"""Experiment runner: generate -> solve -> verify -> report.

Reports are deterministic given (config, seeds): the canonical JSON form
excludes the "timing" section, which is the only nondeterministic content.
"""
from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import generators
from .config import DEFAULT_CONFIG, SplitConfig
from .errors import SplitsimError
from .graphs import BipartiteInstance
from .ledger import _plain
from .multicolor import MulticolorParams, multicolor_split_base, multicolor_split_iterate
from .reductions import (
    coloring_via_splitting,
    greedy_base_coloring,
    greedy_mis,
    mis_via_splitting,
    sinkless_instance,
    splitting_to_orientation,
)
from .verify import (
    check_mis,
    check_multicolor_splitting,
    check_proper_coloring,
    check_sinkless,
    check_weak_splitting,
)
from .weak_split import (
    derandomized_weak_split,
    high_girth_weak_split,
    random_weak_split,
    randomized_weak_split,
    shatter,
    trim_then_split,
    weak_split_delta_ge_6r,
    weak_split_speedup,
)

SCHEMA_VERSION = "splitsim-report-1"


def _split_metrics(b: BipartiteInstance) -> dict:
    return {"n": b.n, "left": b.left, "right": b.right, "m": b.m,
            "delta": b.delta, "Delta": b.Delta, "r": b.r}


def _run_weak_family(solver_name, obj, seed, params, config):
    b = obj
    if solver_name == "random-weak-split":
        coloring = random_weak_split(b, seed)
        ledger = None
    elif solver_name == "derandomized-weak-split":
        coloring, ledger = derandomized_weak_split(b, config)
    elif solver_name == "trim-then-split":
        coloring, ledger = trim_then_split(b, config)
    elif solver_name == "weak-split-speedup":
        coloring, ledger = weak_split_speedup(b, config)
    elif solver_name == "weak-split-delta-ge-6r":
        coloring, ledger = weak_split_delta_ge_6r(
            b, params.get("mode", "deterministic"), seed, config)
    elif solver_name == "randomized-weak-split":
        coloring, ledger = randomized_weak_split(b, seed, config)
    elif solver_name == "high-girth-weak-split":
        coloring, ledger = high_girth_weak_split(
            b, params.get("mode", "deterministic"), seed, config)
    else:
        raise SplitsimError(f"unknown weak-split solver {solver_name}")
    verdict = check_weak_splitting(b, coloring)
    metrics = _split_metrics(b)
    if ledger is not None:
        for key in ("retries", "estimator_initial", "estimator_final",
                    "branch", "path", "n_components", "max_component",
                    "residual_delta", "unsatisfied", "k"):
            if key in ledger.metrics:
                metrics[key] = ledger.metrics[key]
    return coloring, ledger, verdict, metrics


def _run_algo(algo: str, obj, seed: int, params: dict, config: SplitConfig):
    if algo in ("random-weak-split", "derandomized-weak-split",
                "trim-then-split", "weak-split-speedup",
                "weak-split-delta-ge-6r", "randomized-weak-split",
                "high-girth-weak-split"):
        return _run_weak_family(algo, obj, seed, params, config)
    if algo == "shatter":
        sh = shatter(obj, seed)
        comps = sh.components(obj)
        sizes = sorted((c.instance.n for c in comps), reverse=True)
        metrics = _split_metrics(obj)
        metrics.update({"unsatisfied": int(sh.unsatisfied.size),
                        "uncolored": int(sh.uncolored.size),
                        "residual_delta": sh.residual_delta,
                        "max_component": sizes[0] if sizes else 0})
        return sh.coloring, None, None, metrics
    if algo == "multicolor-base":
        mc, ledger = multicolor_split_base(
            obj, params["c_eff"], params["lam"], seed, config)
        verdict = check_multicolor_splitting(obj, mc, params["c_eff"],
                                             params["lam"])
        metrics = _split_metrics(obj)
        metrics["retries"] = ledger.metrics.get("retries", 0)
        return mc, ledger, verdict, metrics
    if algo == "multicolor-iterate":
        mp = MulticolorParams(params["C"], params["lam"])
        mc, ledger = multicolor_split_iterate(obj, mp, config=config)
        lam_eff = ledger.metrics["lam_eff"]
        verdict = check_multicolor_splitting(obj, mc, mc.palette, lam_eff)
        metrics = _split_metrics(obj)
        metrics.update({"iterations": ledger.metrics["iterations"],
                        "lam_eff": lam_eff,
                        "palette_used": ledger.metrics.get("palette_used", 1)})
        return mc, ledger, verdict, metrics
    if algo == "sinkless-pipeline":
        g = obj
        inst = sinkless_instance(g)
        coloring, ledger = weak_split_delta_ge_6r(
            inst, params.get("mode", "deterministic"), seed, config)
        orientation = splitting_to_orientation(g, inst, coloring)
        verdict = check_sinkless(g, orientation)
        metrics = {"n": g.n, "m": g.m, "inst_delta": inst.delta, "inst_r": inst.r}
        return orientation, ledger, verdict, metrics
    if algo == "coloring-via-splitting":
        pc, ledger = coloring_via_splitting(
            obj, params.get("epsilon", 0.2), levels=params.get("levels"),
            config=config)
        verdict = check_proper_coloring(obj, pc)
        metrics = {"n": obj.n, "Delta": obj.max_degree(),
                   "palette": pc.palette,
                   "palette_cap": ledger.metrics["palette_cap"],
                   "depth": ledger.metrics["depth"]}
        return pc, ledger, verdict, metrics
    if algo == "greedy-coloring":
        pc = greedy_base_coloring(obj)
        verdict = check_proper_coloring(obj, pc)
        return pc, None, verdict, {"n": obj.n, "palette": pc.palette}
    if algo == "mis-via-splitting":
        s, ledger = mis_via_splitting(obj, params.get("epsilon", 0.2), config)
        verdict = check_mis(obj, s)
        fr = ledger.metrics["coverage_fractions"]
        metrics = {"n": obj.n, "Delta": obj.max_degree(),
                   "size": int(s.members.size),
                   "min_coverage": min(fr) if fr else 1.0}
        return s, ledger, verdict, metrics
    if algo == "greedy-mis":
        s = greedy_mis(obj)
        verdict = check_mis(obj, s)
        return s, None, verdict, {"n": obj.n, "size": int(s.members.size)}
    raise SplitsimError(f"unknown algorithm {algo!r}")


def _one_run(config: dict, seed: int, split_config: SplitConfig) -> dict:
    gen = config["generator"]
    t0 = time.perf_counter()
    row: dict = {"seed": int(seed)}
    try:
        obj = generators.generate(gen["kind"], gen.get("params", {}), seed)
        cert, ledger, verdict, metrics = _run_algo(
            config["algo"], obj, seed, config.get("algo_params", {}),
            split_config)
        row["verdict"] = ("valid" if verdict is None or verdict.valid
                          else "invalid")
        if verdict is not None and not verdict.valid:
            row["violations"] = verdict.violations[:10]
        row["certificate"] = cert.to_json()
        row["metrics"] = _plain(metrics)
        if ledger is not None:
            row["ledger"] = ledger.to_json()
    except SplitsimError as exc:
        row["verdict"] = f"error:{type(exc).__name__}"
        row["error"] = str(exc)
    row["_wall_ms"] = (time.perf_counter() - t0) * 1000.0
    return row


def _percentiles(values: list[float]) -> dict:
    if not values:
        return {}
    arr = np.array(values, dtype=np.float64)
    return {"p50": float(np.percentile(arr, 50)),
            "p90": float(np.percentile(arr, 90)),
            "max": float(arr.max()), "mean": float(arr.mean())}


def run_experiment(config: dict, split_config: SplitConfig = DEFAULT_CONFIG,
                   workers: int = 1) -> dict:
    """Execute config["reps"] runs with seeds base..base+reps-1 (or an explicit
    config["seeds"] list) and return the report dict."""
    if "seeds" in config:
        seeds = [int(s) for s in config["seeds"]]
    else:
        base = int(config.get("seed", 0))
        seeds = [base + i for i in range(int(config.get("reps", 1)))]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda s: _one_run(config, s, split_config),
                                 seeds))
    else:
        rows = [_one_run(config, s, split_config) for s in seeds]
    timing = {"per_run_ms": [r.pop("_wall_ms") for r in rows]}
    timing["total_ms"] = float(sum(timing["per_run_ms"]))
    n_valid = sum(1 for r in rows if r["verdict"] == "valid")
    agg = {"runs": len(rows), "valid": n_valid,
           "valid_fraction": n_valid / max(len(rows), 1)}
    numeric: dict[str, list[float]] = {}
    for r in rows:
        for key, val in r.get("metrics", {}).items():
            if isinstance(val, (int, float)) and not isinstance(val, bool):
                numeric.setdefault(key, []).append(float(val))
    agg["metrics"] = {k: _percentiles(v) for k, v in sorted(numeric.items())}
    return {"schema_version": SCHEMA_VERSION, "config": config,
            "runs": rows, "aggregate": agg, "timing": timing}


def canonical_report_json(report: dict) -> str:
    """Deterministic byte form: everything except the timing section."""
    trimmed = {k: v for k, v in report.items() if k != "timing"}
    return json.dumps(trimmed, sort_keys=True, separators=(",", ":"))


def report_to_csv(report: dict) -> str:
    """Flat per-run metric rows (includes wall time; not part of the
    deterministic surface)."""
    rows = report["runs"]
    keys: list[str] = []
    for r in rows:
        for k in r.get("metrics", {}):
            if k not in keys:
                keys.append(k)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["seed", "verdict"] + keys + ["wall_ms"])
    per_ms = report.get("timing", {}).get("per_run_ms", [])
    for i, r in enumerate(rows):
        met = r.get("metrics", {})
        writer.writerow([r["seed"], r["verdict"]]
                        + [met.get(k, "") for k in keys]
                        + [f"{per_ms[i]:.3f}" if i < len(per_ms) else ""])
    return buf.getvalue()


def reverify_report(report: dict) -> bool:
    """Regenerate each run's instance and re-check its stored certificate."""
    from .types import certificate_from_json

    config = report["config"]
    gen = config["generator"]
    ok = True
    for row in report["runs"]:
        if not row["verdict"].startswith(("valid", "invalid")):
            continue
        obj = generators.generate(gen["kind"], gen.get("params", {}),
                                  row["seed"])
        cert = certificate_from_json(row["certificate"])
        kind = row["certificate"]["type"]
        if kind == "two-coloring":
            if np.any(cert.values == 0):
                continue  # partial shatter output; nothing to re-check
            verdict = check_weak_splitting(obj, cert)
        elif kind == "multicoloring":
            lam = row["metrics"].get("lam_eff",
                                     config.get("algo_params", {}).get("lam", 1.0))
            verdict = check_multicolor_splitting(obj, cert, cert.palette, lam)
        elif kind == "orientation":
            verdict = check_sinkless(obj, cert)
        elif kind == "coloring":
            verdict = check_proper_coloring(obj, cert)
        elif kind == "mis":
            verdict = check_mis(obj, cert)
        else:
            continue
        ok &= verdict.valid == (row["verdict"] == "valid")
    return ok
