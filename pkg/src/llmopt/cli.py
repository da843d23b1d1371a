"""Command-line surface: evolve, benchmark, analyze, report.

Exit codes: 0 success, 2 invalid configuration or arguments, 3 gateway
abort (the session checkpoint is kept and can be resumed).
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from collections import Counter
from pathlib import Path

import numpy as np

from .analysis import name_tokens, session_analytics, write_analytics_csv
from .benchmarks import FUNCTION_NAMES
from .evolution import run_evolution, run_seed_for
from .executor import (
    DEFAULT_SHIM_CMD,
    ExecutionSpec,
    InProcessExecutor,
    NativeExecutor,
    SubprocessExecutor,
)
from .gateway import (
    ConfigError,
    GatewayError,
    HttpGateway,
    MockGateway,
    RecordingGateway,
    ReplayGateway,
)
from .metrics import AoccBounds, aggregate_aocc, aocc, eaf, eaf_auc
from .optimizers import ERADS_PRESETS, OPTIMIZER_IDS
from .store import (
    GATEWAY_MODES,
    RunTrace,
    SessionStore,
    build_manifest,
    load_config,
    load_trajectory_csv,
    write_trajectory_csv,
)


def _fail(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)


# ---------------------------------------------------------------------------
# evolve
# ---------------------------------------------------------------------------


def _make_gateway(mode: str, cfg, store: SessionStore):
    if mode == "live":
        inner = HttpGateway(endpoint_url=cfg.gateway.endpoint_url, api_key_env=cfg.gateway.api_key_env)
        return RecordingGateway(inner, store.recording_path)
    if mode == "mock":
        if not cfg.gateway.mock_script:
            raise ConfigError("gateway.mock_script: required for --gateway mock")
        return MockGateway.from_script_file(cfg.gateway.mock_script)
    if mode == "replay":
        path = cfg.gateway.recording or store.recording_path
        return ReplayGateway(path)
    raise ConfigError(f"gateway mode must be one of {GATEWAY_MODES}, got {mode!r}")


def _make_executor(cfg):
    if cfg.executor.kind == "inprocess":
        return InProcessExecutor()
    shim_cmd = cfg.executor.shim_cmd or DEFAULT_SHIM_CMD
    return SubprocessExecutor(shim_cmd)


def cmd_evolve(args) -> int:
    cfg = load_config(args.config)
    if args.workers is not None:
        loop = dataclasses.replace(cfg.loop, workers=args.workers)
        cfg = dataclasses.replace(cfg, loop=loop)
    out = Path(args.out) if args.out else Path(f"session-{time.strftime('%Y%m%d-%H%M%S')}")
    store = SessionStore(out)

    completed = []
    if args.resume:
        completed = store.load_candidates()
    elif store.count() > 0:
        raise ConfigError(f"{out} already holds iteration records; pass --resume to continue")

    gateway = _make_gateway(args.gateway, cfg, store)
    executor = _make_executor(cfg)
    store.write_manifest(build_manifest(cfg, args.gateway))

    try:
        best, history = run_evolution(
            cfg.loop,
            gateway,
            executor,
            on_iteration=lambda outcome: store.append_outcome(outcome, cfg.loop.strategy),
            model=cfg.gateway.model,
            completed=completed,
        )
    except GatewayError as exc:
        _fail(f"gateway aborted: {exc}")
        _fail(f"checkpoint kept at {out}; rerun with --resume to continue")
        return 3

    rows = session_analytics(store.records())
    write_analytics_csv(rows, store.analytics_path)
    print(f"session: {out}")
    print(f"best: {best.name} mean={best.mean:.4f} std={best.std:.4f}")
    return 0


# ---------------------------------------------------------------------------
# benchmark
# ---------------------------------------------------------------------------


def _summarize_runs(runs, budget: int, instances) -> tuple[float, float]:
    bounds = AoccBounds(budget=budget)
    per_cell: dict[tuple, list] = {}
    for run in runs:
        per_cell.setdefault((run.fid, run.iid), []).append(aocc(run.best_precision, bounds))
    cells = {key: float(np.mean(vals)) for key, vals in per_cell.items()}
    score = aggregate_aocc(cells, instances)
    curve = eaf([run.best_precision for run in runs], bounds)
    return score, eaf_auc(curve)


def cmd_benchmark(args) -> int:
    optimizers = [o.strip() for o in args.optimizers.split(",") if o.strip()]
    unknown = [o for o in optimizers if o not in OPTIMIZER_IDS]
    if unknown:
        raise ConfigError(f"unknown optimizer ids {unknown}; known: {sorted(OPTIMIZER_IDS)}")
    if args.preset not in ERADS_PRESETS:
        raise ConfigError(f"unknown preset {args.preset!r}; known: {sorted(ERADS_PRESETS)}")
    dims = [int(d) for d in args.dims.split(",") if d.strip()]
    instances = tuple(range(1, args.instances + 1))
    seeds = tuple(range(1, args.seeds + 1))
    out = Path(args.out) if args.out else Path(f"results-{time.strftime('%Y%m%d-%H%M%S')}")
    out.mkdir(parents=True, exist_ok=True)

    summary = []
    for optimizer in optimizers:
        params = ERADS_PRESETS[args.preset] if optimizer == "erads" else None
        executor = NativeExecutor(optimizer, params)
        for dim in dims:
            coords = [
                (fid, iid, seed)
                for fid in sorted(FUNCTION_NAMES)
                for iid in instances
                for seed in seeds
            ]

            def one(coord):
                fid, iid, seed = coord
                spec = ExecutionSpec(
                    code="",
                    dimension=dim,
                    budget=args.budget,
                    fid=fid,
                    iid=iid,
                    # the repetition slot carries the dimension so runs in a
                    # multi-dimensional sweep never share a seed
                    run_seed=run_seed_for(args.master_seed, dim, fid, iid, seed),
                    master_seed=args.master_seed,
                )
                outcome = executor.execute(spec)
                return RunTrace(fid, iid, seed, outcome.trajectory.best_precision)

            if args.workers > 1:
                import concurrent.futures

                with concurrent.futures.ThreadPoolExecutor(max_workers=args.workers) as pool:
                    runs = list(pool.map(one, coords))
            else:
                runs = [one(c) for c in coords]

            write_trajectory_csv(out / f"trajectories_{optimizer}_{dim}d.csv", runs)
            score, auc = _summarize_runs(runs, args.budget, instances)
            summary.append((optimizer, dim, score, auc))
            print(f"{optimizer:>14}  d={dim:<3} aocc={score:.4f}  eaf_auc={auc:.4f}")

    with (out / "summary.csv").open("w") as fh:
        fh.write("optimizer,dimension,aocc,eaf_auc\n")
        for optimizer, dim, score, auc in summary:
            fh.write(f"{optimizer},{dim},{score:.6f},{auc:.6f}\n")
    print(f"results: {out}")
    return 0


# ---------------------------------------------------------------------------
# analyze / report
# ---------------------------------------------------------------------------


def _trajectory_files(results: Path) -> list[tuple[str, int, Path]]:
    found = []
    for path in sorted(results.glob("trajectories_*.csv")):
        parts = path.stem.split("_")
        dim_part = parts[-1]
        if not dim_part.endswith("d"):
            continue
        found.append(("_".join(parts[1:-1]), int(dim_part[:-1]), path))
    return found


def cmd_analyze(args) -> int:
    if bool(args.session) == bool(args.results):
        raise ConfigError("pass exactly one of --session or --results")

    if args.session:
        store = SessionStore(args.session)
        records = store.records()
        if not records:
            raise ConfigError(f"no iteration records under {args.session}")
        out = Path(args.out) if args.out else store.directory
        out.mkdir(parents=True, exist_ok=True)
        rows = session_analytics(records)
        write_analytics_csv(rows, out / "analytics.csv")
        counts: Counter = name_tokens([r["candidate"]["name"] for r in records])
        with (out / "name_tokens.csv").open("w") as fh:
            fh.write("token,count\n")
            for token, count in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
                fh.write(f"{token},{count}\n")
        print(f"analytics: {out}")
        return 0

    results = Path(args.results)
    files = _trajectory_files(results)
    if not files:
        raise ConfigError(f"no trajectory CSVs under {results}")
    out = Path(args.out) if args.out else results
    out.mkdir(parents=True, exist_ok=True)
    for optimizer, dim, path in files:
        runs = load_trajectory_csv(path)
        budget = max(run.best_precision.size for run in runs)
        curve = eaf([run.best_precision for run in runs], AoccBounds(budget=budget))
        target = out / f"eaf_{optimizer}_{dim}d.csv"
        with target.open("w") as fh:
            fh.write("evaluation,fraction\n")
            for b, frac in zip(curve.budgets, curve.fraction):
                fh.write(f"{b},{frac:.6f}\n")
        print(f"eaf curve: {target}")
    return 0


def cmd_report(args) -> int:
    results = Path(args.results)
    files = _trajectory_files(results)
    if not files:
        raise ConfigError(f"no trajectory CSVs under {results}")
    rows = []
    for optimizer, dim, path in files:
        runs = load_trajectory_csv(path)
        budget = max(run.best_precision.size for run in runs)
        instances = sorted({run.iid for run in runs})
        score, auc = _summarize_runs(runs, budget, instances)
        rows.append((optimizer, dim, score, auc))
    rows.sort(key=lambda r: (-r[2], r[0]))
    print(f"{'optimizer':>14} {'dim':>4} {'aocc':>8} {'eaf_auc':>8}")
    for optimizer, dim, score, auc in rows:
        print(f"{optimizer:>14} {dim:>4} {score:8.4f} {auc:8.4f}")
    with (results / "report.csv").open("w") as fh:
        fh.write("optimizer,dimension,aocc,eaf_auc\n")
        for optimizer, dim, score, auc in rows:
            fh.write(f"{optimizer},{dim},{score:.6f},{auc:.6f}\n")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="llmopt",
        description="Evolve and evaluate black-box optimization heuristics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    evolve = sub.add_parser("evolve", help="run an evolution session")
    evolve.add_argument("--config", required=True)
    evolve.add_argument("--gateway", choices=GATEWAY_MODES, default="live")
    evolve.add_argument("--out", default=None)
    evolve.add_argument("--resume", action="store_true")
    evolve.add_argument("--workers", type=int, default=None)
    evolve.set_defaults(func=cmd_evolve)

    benchmark = sub.add_parser("benchmark", help="run native optimizers over the suite")
    benchmark.add_argument("--optimizers", default="erads,de,random_search")
    benchmark.add_argument("--dims", default="5")
    benchmark.add_argument("--instances", type=int, default=3)
    benchmark.add_argument("--seeds", type=int, default=3)
    benchmark.add_argument("--budget", type=int, default=10_000)
    benchmark.add_argument("--master-seed", type=int, default=0)
    benchmark.add_argument("--preset", default="default")
    benchmark.add_argument("--workers", type=int, default=1)
    benchmark.add_argument("--out", default=None)
    benchmark.set_defaults(func=cmd_benchmark)

    analyze = sub.add_parser("analyze", help="derive analytics from a session or results")
    analyze.add_argument("--session", default=None)
    analyze.add_argument("--results", default=None)
    analyze.add_argument("--out", default=None)
    analyze.set_defaults(func=cmd_analyze)

    report = sub.add_parser("report", help="recompute the summary table from raw trajectories")
    report.add_argument("--results", required=True)
    report.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        _fail(str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
