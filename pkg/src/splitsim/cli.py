"""Command-line surface: generate / run / verify / bench.

Exit codes: 0 all valid, 2 any certificate violation, 1 error.
SPLIT_LOG sets the log level (default WARNING).
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time

import numpy as np

from . import generators
from .errors import SplitsimError
from .experiment import canonical_report_json, report_to_csv, run_experiment
from .graphs import BipartiteInstance, SimGraph
from .types import certificate_from_json
from .verify import (
    check_mis,
    check_multicolor_splitting,
    check_orientation_discrepancy,
    check_proper_coloring,
    check_sinkless,
    check_uniform_split,
    check_weak_splitting,
)

log = logging.getLogger("splitsim")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2


def _setup_logging() -> None:
    level = os.environ.get("SPLIT_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _write_out(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _parse_params(raw: str | None) -> dict:
    return json.loads(raw) if raw else {}


def cmd_generate(args) -> int:
    obj = generators.generate(args.kind, _parse_params(args.params), args.seed)
    _write_out(json.dumps(obj.to_json(), sort_keys=True, separators=(",", ":")),
               args.out)
    return EXIT_OK


def cmd_run(args) -> int:
    if args.config:
        config = _load_json(args.config)
    else:
        config = {"algo": args.algo,
                  "algo_params": _parse_params(args.algo_params),
                  "generator": {"kind": args.kind,
                                "params": _parse_params(args.params)},
                  "seed": args.seed, "reps": args.reps}
    report = run_experiment(config, workers=args.workers)
    if args.format == "csv":
        _write_out(report_to_csv(report), args.out)
    else:
        _write_out(canonical_report_json(report), args.out)
    bad = [r for r in report["runs"] if r["verdict"] != "valid"]
    if bad:
        log.warning("%d of %d runs not valid", len(bad), len(report["runs"]))
        return EXIT_VIOLATION
    return EXIT_OK


_CHECKS = ("weak-splitting", "multicolor", "weak-multicolor", "sinkless",
           "discrepancy", "proper-coloring", "mis", "uniform")


def _load_instance(obj: dict):
    if "left" in obj:
        return BipartiteInstance.from_json(obj)
    return SimGraph.from_json(obj)


def cmd_verify(args) -> int:
    inst = _load_instance(_load_json(args.instance))
    cert = certificate_from_json(_load_json(args.certificate))
    params = _parse_params(args.params)
    kind = args.check
    if kind is None:
        kind = {"two-coloring": "weak-splitting", "multicoloring": "multicolor",
                "orientation": "sinkless", "coloring": "proper-coloring",
                "mis": "mis"}.get(cert.to_json()["type"])
    if kind == "weak-splitting":
        verdict = check_weak_splitting(inst, cert)
    elif kind == "multicolor":
        verdict = check_multicolor_splitting(
            inst, cert, params.get("C", cert.palette), params["lam"])
    elif kind == "weak-multicolor":
        verdict = check_weak_multicolor_cli(inst, cert, params)
    elif kind == "sinkless":
        verdict = check_sinkless(inst, cert)
    elif kind == "discrepancy":
        disc, mx = check_orientation_discrepancy(inst, cert)
        report = {"check": kind, "valid": True, "max_discrepancy": mx,
                  "per_node": [int(d) for d in disc]}
        _write_out(json.dumps(report, sort_keys=True), args.out)
        return EXIT_OK
    elif kind == "proper-coloring":
        verdict = check_proper_coloring(inst, cert)
    elif kind == "mis":
        verdict = check_mis(inst, cert)
    elif kind == "uniform":
        verdict = check_uniform_split(inst, cert, params["epsilon"])
    else:
        raise SplitsimError(f"unknown check {kind!r}; choose from {_CHECKS}")
    report = {"check": kind, **verdict.to_json()}
    _write_out(json.dumps(report, sort_keys=True), args.out)
    return EXIT_OK if verdict.valid else EXIT_VIOLATION


def check_weak_multicolor_cli(inst, cert, params):
    from .verify import check_weak_multicolor, weak_multicolor_thresholds

    if "degree_threshold" in params:
        dt, ct = params["degree_threshold"], params["color_threshold"]
    else:
        dt, ct = weak_multicolor_thresholds(inst.n,
                                            params.get("variant", "base"))
    return check_weak_multicolor(inst, cert, dt, ct)


def _bench_case(name, fn_active, fn_reference, args_tuple, reps: int):
    fn_active(*args_tuple)  # warmup (JIT compile)
    rows = []
    for label, fn, nreps in (("numba", fn_active, reps),
                             ("numpy", fn_reference, 1)):
        t0 = time.perf_counter()
        for _ in range(nreps):
            fn(*args_tuple)
        dt = (time.perf_counter() - t0) / nreps * 1000.0
        rows.append((name, label, dt))
    return rows


def cmd_bench(args) -> int:
    from ._kernels import BACKEND, active, reference
    from .weak_split import _p2_table

    if BACKEND != "numba":
        log.warning("numba backend unavailable; comparing numpy against itself")
    rng = np.random.default_rng(0)
    left = args.size // 5
    right = args.size - left
    delta = max(4, min(16, right * 8 // (2 * max(left, 1))))
    inst = generators.random_bipartite(left, right, delta, 8, seed=1,
                                       dmax=min(delta + delta // 2, right))
    g = inst.as_graph()
    order = rng.permutation(inst.right).astype(np.int64)
    p2 = _p2_table(inst.Delta + 1, 400)
    cases = [
        ("power-coloring(k=2)", active.greedy_power_coloring,
         reference.greedy_power_coloring, (g.indptr, g.indices, g.n, 2)),
        ("euler-orient", active.euler_orient, reference.euler_orient,
         (g.n, np.ascontiguousarray(g.edges[:, 0]),
          np.ascontiguousarray(g.edges[:, 1]))),
        ("condexp-weak-split", active.condexp_weak_split,
         reference.condexp_weak_split,
         (inst.u_ptr, inst.u_adj, inst.v_ptr, inst.v_adj, order, p2)),
        ("girth(cap=10)", active.girth_bfs, reference.girth_bfs,
         (g.indptr, g.indices, g.n, 10)),
    ]
    results = []
    for name, fa, fr, tup in cases:
        if args.kernel not in ("all", name):
            continue
        results.extend(_bench_case(name, fa, fr, tup, args.reps))
    lines = [f"instance: n={inst.n} m={inst.m} delta={inst.delta} r={inst.r}",
             f"{'kernel':<24}{'backend':<10}{'ms/call':>12}"]
    speed: dict[str, dict[str, float]] = {}
    for name, label, dt in results:
        lines.append(f"{name:<24}{label:<10}{dt:>12.3f}")
        speed.setdefault(name, {})[label] = dt
    for name, d in speed.items():
        if "numba" in d and "numpy" in d and d["numba"] > 0:
            lines.append(f"{name:<24}{'speedup':<10}{d['numpy'] / d['numba']:>11.1f}x")
    _write_out("\n".join(lines), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="splitsim",
                                 description="Distributed splitting simulator")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="emit an instance/graph as JSON")
    g.add_argument("--kind", required=True)
    g.add_argument("--params", help="JSON dict of generator parameters")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(fn=cmd_generate)

    r = sub.add_parser("run", help="run an experiment and emit a report")
    r.add_argument("--config", help="JSON config file (overrides flags)")
    r.add_argument("--algo")
    r.add_argument("--algo-params", dest="algo_params")
    r.add_argument("--kind")
    r.add_argument("--params")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--reps", type=int, default=1)
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--out")
    r.add_argument("--format", choices=("json", "csv"), default="json")
    r.set_defaults(fn=cmd_run)

    v = sub.add_parser("verify", help="check a certificate against an instance")
    v.add_argument("--instance", required=True)
    v.add_argument("--certificate", required=True)
    v.add_argument("--check", choices=_CHECKS)
    v.add_argument("--params", help="JSON dict (lam, epsilon, thresholds)")
    v.add_argument("--out")
    v.set_defaults(fn=cmd_verify)

    b = sub.add_parser("bench", help="compare numba kernels with the numpy path")
    b.add_argument("--size", type=int, default=6000, help="total node count")
    b.add_argument("--reps", type=int, default=3)
    b.add_argument("--kernel", default="all")
    b.add_argument("--out")
    b.set_defaults(fn=cmd_bench)
    return ap


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (SplitsimError, ValueError, KeyError, OSError,
            json.JSONDecodeError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
