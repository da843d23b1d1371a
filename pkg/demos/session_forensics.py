#!/usr/bin/env python3
"""Persist an offline evolution session, then mine it.

Writes a real session directory (manifest, iteration log, recording dir),
reloads the log, and reports the code-change analytics: line diff ratio
and name similarity between parent and child, plus the token frequency
table over candidate names.

Usage:
    python demos/session_forensics.py [--out DIR]     # default: a temp dir
"""

import argparse
import json
import tempfile
from pathlib import Path

from llmopt.analysis import name_tokens, session_analytics, write_analytics_csv
from llmopt.evolution import LoopConfig, Strategy, run_evolution
from llmopt.executor import InProcessExecutor
from llmopt.gateway import MockGateway
from llmopt.store import ExperimentConfig, ExecutorSettings, SessionStore, build_manifest

TEMPLATE = """\
# Name: {name}
```python
import numpy as np

class {cls}:
    def __init__(self, budget, dim):
        self.budget = budget
        self.dim = dim

    def __call__(self, f):
        best = None
        for _ in range(self.budget):
            x = np.random.uniform(-5.0, 5.0, self.dim)
            y = f(x)
            if best is None or y < best:
                best = y{extra}
```
"""

RESPONSES = [
    TEMPLATE.format(name="Uniform Scout", cls="UniformScout", extra=""),
    TEMPLATE.format(
        name="Uniform Scout v2",
        cls="UniformScoutV2",
        extra="\n        self.last = best",
    ),
    TEMPLATE.format(name="Latin Lattice Scout", cls="LatinLatticeScout", extra=""),
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    out = Path(args.out) if args.out else Path(tempfile.mkdtemp(prefix="session-"))

    cfg = LoopConfig(
        iterations=2,
        repetitions=2,
        budget=200,
        dimension=3,
        fids=(1, 12),
        instances=(1,),
        seeds=(1,),
        strategy=Strategy(mode="comma_one"),
    )
    experiment = ExperimentConfig(
        loop=cfg, executor=ExecutorSettings(kind="inprocess")
    )
    store = SessionStore(out)
    store.write_manifest(build_manifest(experiment, gateway_mode="mock"))
    run_evolution(
        cfg,
        MockGateway(RESPONSES),
        InProcessExecutor(),
        on_iteration=lambda o: store.append_outcome(o, cfg.strategy),
    )

    print(f"session directory: {out}")
    manifest = json.loads(store.manifest_path.read_text())
    print(f"suite digest: {manifest['suite_digest'][:16]}...")

    records = store.records()
    print(f"\n{len(records)} iterations on disk:")
    for rec in records:
        c = rec["candidate"]
        print(f"  {rec['iteration']}: {c['name']:<22s} mean {c['mean']:.4f}")

    rows = session_analytics(records)
    write_analytics_csv(rows, store.analytics_path)
    print("\nparent -> child changes (seed iteration has no parent):")
    print("iter  parent  diff_ratio  name_jaro")
    for row in rows:
        diff = "-" if row.diff_ratio is None else f"{row.diff_ratio:.4f}"
        jaro = "-" if row.jaro is None else f"{row.jaro:.4f}"
        print(f"{row.iteration:4d}  {row.parent_id or '-':<6s}  {diff:>10s}  {jaro:>9s}")

    names = [r["candidate"]["name"] for r in records]
    print("\nname tokens:")
    for token, count in name_tokens(names).most_common():
        print(f"  {count:2d}  {token}")

    print(f"\nanalytics written to {store.analytics_path}")


if __name__ == "__main__":
    main()
