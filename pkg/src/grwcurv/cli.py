"""grw: command-line front end (classify, verify, sweep).

Exit codes: 0 verdict pass, 2 verdict fail, 1 configuration or input error.
"""
from __future__ import annotations

import argparse
import multiprocessing
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

from . import __version__
from .conditionlab import evaluate, classify_sets, quasi_einstein
from .config import (
    ConfigError,
    PointSpec,
    ScenarioConfig,
    build_point,
    load_config,
    point_specs,
    sweep_grid,
)
from .report import payload, to_csv, to_json, to_table
from .suites import SUITES, run_suite

JOBS_ENV = "GRW_JOBS"
EXIT_PASS, EXIT_ERROR, EXIT_FAIL = 0, 1, 2


def _jobs(arg: Optional[int]) -> int:
    if arg is not None:
        return max(1, arg)
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def _ordered_map(fn, tasks: list, jobs: int) -> list:
    """Map preserving task order; results never depend on the number of workers."""
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    # spawn, not fork: jax holds threads that a forked child would inherit
    ctx = multiprocessing.get_context("spawn")
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks)), mp_context=ctx) as ex:
        return list(ex.map(fn, tasks))


# --- classify ---------------------------------------------------------------------------


def _classify_point(task) -> dict:
    ps, conditions, fit_tol, mem_tol = task
    snap, fiber, ea2, extra = build_point(ps)
    results = {}
    for cid in conditions:
        results[cid] = evaluate(snap, cid, fit_tol, fiber=fiber, ea2=ea2).to_dict()
    return {
        "index": ps.index,
        "label": ps.label,
        "params": ps.params,
        "dim": snap.dim,
        "kappa": snap.kappa,
        "scalars": extra,
        "membership": classify_sets(snap, mem_tol).to_dict(),
        "quasi_einstein": quasi_einstein(snap, mem_tol).to_dict(),
        "conditions": results,
    }


def _verdict(points: list) -> tuple:
    fails, vacuous = [], 0
    for p in points:
        for cid, r in p["conditions"].items():
            if r["status"] in ("degenerate", "skipped", "vacuous"):
                vacuous += 1
            elif not r["holds"]:
                fails.append(f"{p['label']}:{cid}")
    return ("fail" if fails else "pass"), fails, vacuous


def run_classify(cfg: ScenarioConfig, jobs: int = 1) -> dict:
    t0 = time.perf_counter()
    specs = point_specs(cfg)
    tasks = [(ps, cfg.conditions, cfg.fit_tol, cfg.membership_tol) for ps in specs]
    points = _ordered_map(_classify_point, tasks, jobs)
    verdict, fails, vacuous = _verdict(points)
    return {
        "tool": "grw",
        "version": __version__,
        "command": "classify",
        "config": cfg.raw,
        "seed": cfg.seed,
        "tolerances": {"fit": cfg.fit_tol, "membership": cfg.membership_tol},
        "points": points,
        "verdict": verdict,
        "failing": fails,
        "n_vacuous": vacuous,
        "wall_clock_s": time.perf_counter() - t0,
    }


def classify_rows(report: dict) -> tuple:
    conds = list(report["points"][0]["conditions"]) if report["points"] else []
    rows = []
    for p in report["points"]:
        for cid in conds:
            r = p["conditions"][cid]
            rows.append({"point": p["label"], "condition": cid, "status": r["status"],
                         "holds": r["holds"],
                         "coefficient": r["coefficients"][0] if r["coefficients"] else None,
                         "residual": r["residual"]})
    return rows, ["point", "condition", "status", "holds", "coefficient", "residual"]


# --- verify -----------------------------------------------------------------------------


def _suite_task(task) -> dict:
    name, seed = task
    t0 = time.perf_counter()
    res = run_suite(name, seed)
    res["elapsed_s"] = time.perf_counter() - t0
    return res


def run_verify(suite: str, seed: int = 0, jobs: int = 1) -> dict:
    t0 = time.perf_counter()
    names = list(SUITES) if suite == "all" else [suite]
    results = _ordered_map(_suite_task, [(n, seed) for n in names], jobs)
    # per-suite timings are wall-clock data; keep them out of the deterministic payload
    timings = {r["suite"]: r.pop("elapsed_s") for r in results}
    verdict = "pass" if all(r["verdict"] == "pass" for r in results) else "fail"
    return {
        "tool": "grw",
        "version": __version__,
        "command": "verify",
        "suite": suite,
        "seed": seed,
        "suites": results,
        "verdict": verdict,
        "wall_clock_s": {"total": time.perf_counter() - t0, **timings},
    }


def verify_rows(report: dict) -> tuple:
    rows = []
    for s in report["suites"]:
        for c in s["checks"]:
            rows.append({"suite": s["suite"], "check": c["name"], "status": c["status"],
                         "holds": c["holds"], "expected": c["expected"],
                         "observed": c["observed"], "residual": c["residual"], "tol": c["tol"]})
    return rows, ["suite", "check", "status", "holds", "expected", "observed", "residual", "tol"]


# --- sweep ------------------------------------------------------------------------------


def _sweep_task(task) -> list:
    cfg, override = task
    rows = []
    for ps in point_specs(cfg, override):
        res = _classify_point((ps, cfg.conditions, cfg.fit_tol, cfg.membership_tol))
        row = {**{k: v for k, v in ps.params.items()}, **res["scalars"]}
        for cid, r in res["conditions"].items():
            row[f"{cid}_L"] = r["coefficients"][0] if r["coefficients"] else None
            row[f"{cid}_residual"] = r["residual"]
            row[f"{cid}_status"] = r["status"]
        rows.append(row)
    return rows


def run_sweep(cfg: ScenarioConfig, jobs: int = 1) -> dict:
    t0 = time.perf_counter()
    grid = sweep_grid(cfg)
    if not grid:
        raise ConfigError("empty sweep grid")
    if cfg.sweep and "x1" in cfg.sweep:
        man = dict(cfg.manifold)
        man["x1"] = cfg.sweep["x1"]
        for k in ("samples", "range"):
            man.pop(k, None)
        cfg = ScenarioConfig(**{**cfg.__dict__, "manifold": man})
    for override in grid:
        point_specs(cfg, override)  # validate every cell before starting
    chunks = _ordered_map(_sweep_task, [(cfg, o) for o in grid], jobs)
    rows = [r for chunk in chunks for r in chunk]
    keys = list(sorted(grid[0]))
    cols = keys + ["x1", "trT", "Delta1F_over_4F"]
    for cid in cfg.conditions:
        cols += [f"{cid}_L", f"{cid}_residual", f"{cid}_status"]
    fails = [i for i, r in enumerate(rows) for cid in cfg.conditions
             if r[f"{cid}_status"] == "ok" and r[f"{cid}_residual"] > cfg.fit_tol]
    return {
        "tool": "grw",
        "version": __version__,
        "command": "sweep",
        "config": cfg.raw,
        "seed": cfg.seed,
        "columns": cols,
        "rows": rows,
        "verdict": "fail" if fails else "pass",
        "wall_clock_s": time.perf_counter() - t0,
    }


# --- entry point ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="grw", description="Curvature-condition toolkit for "
                                 "warped products with a one-dimensional base.")
    ap.add_argument("--version", action="version", version=f"grw {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, config: bool):
        if config:
            p.add_argument("--config", required=True, help="scenario TOML file")
        p.add_argument("--out", help="write the report here")
        p.add_argument("--format", choices=("json", "csv", "table"), default=None)
        p.add_argument("--tol", type=float, help="override the fit tolerance")
        p.add_argument("--seed", type=int, help="override the seed")
        p.add_argument("--jobs", type=int, help=f"worker processes (default ${JOBS_ENV} or 1)")

    common(sub.add_parser("classify", help="evaluate conditions on the scenario points"), True)
    pv = sub.add_parser("verify", help="run a canonical verification suite")
    pv.add_argument("--suite", required=True, choices=sorted(SUITES) + ["all"])
    common(pv, False)
    common(sub.add_parser("sweep", help="grid over warping parameters, one CSV row per cell"),
           True)
    return ap


def _emit(report: dict, rows: list, cols: list, fmt: str, out: Optional[str]):
    # timings go to stderr so that written reports are byte-reproducible
    clock = report.get("wall_clock_s")
    total = clock.get("total") if isinstance(clock, dict) else clock
    if total is not None:
        sys.stderr.write(f"wall clock: {total:.3f} s\n")
    table = to_table(rows, cols)
    docs = {"json": lambda: to_json(payload(report)) + "\n", "csv": lambda: to_csv(rows, cols),
            "table": lambda: table}
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(docs[fmt]())
        sys.stdout.write(table)
    else:
        sys.stdout.write(docs[fmt]())
    sys.stdout.write(f"verdict: {report['verdict']}\n")


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    jobs = _jobs(args.jobs)
    try:
        if args.command == "verify":
            if args.tol is not None:
                raise ConfigError("verify uses the per-check tolerances; --tol is not accepted")
            report = run_verify(args.suite, args.seed or 0, jobs)
            rows, cols = verify_rows(report)
            fmt = args.format or "json"
        else:
            cfg = load_config(args.config)
            if args.seed is not None:
                cfg.seed = args.seed
            if args.tol is not None:
                if not args.tol > 0:
                    raise ConfigError("--tol must be positive")
                cfg.fit_tol = args.tol
            if args.out is None and cfg.out_path:
                args.out = cfg.out_path
            if args.command == "classify":
                report = run_classify(cfg, jobs)
                rows, cols = classify_rows(report)
                fmt = args.format or cfg.out_format
            else:
                report = run_sweep(cfg, jobs)
                rows, cols = report["rows"], report["columns"]
                fmt = args.format or "csv"
    except ValueError as exc:  # ConfigError and input errors raised while building points
        print(f"grw: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    _emit(report, rows, cols, fmt, args.out)
    return EXIT_PASS if report["verdict"] == "pass" else EXIT_FAIL


__all__ = ["main", "run_classify", "run_verify", "run_sweep", "payload", "PointSpec"]

if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
