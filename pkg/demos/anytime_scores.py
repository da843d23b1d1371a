#!/usr/bin/env python3
"""Score a single optimization run two ways and show they agree.

Runs random search once, prints the best-so-far trace, then computes the
area-over-convergence score directly and via the attainment-curve route
with an increasingly fine target grid. The two numbers converge.

Usage:
    python demos/anytime_scores.py [--budget N] [--seed S]
"""

import argparse

from llmopt.benchmarks import BudgetedEvaluator, make_instance
from llmopt.metrics import AoccBounds, aocc, eaf, eaf_auc
from llmopt.optimizers import run_random_search


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--budget", type=int, default=500)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    ev = BudgetedEvaluator(make_instance(fid=5, iid=1, d=4), budget=args.budget)
    result = run_random_search(ev, seed=args.seed)
    traj = result.trajectory

    print(f"random search on f5, d=4, budget {args.budget}, seed {args.seed}")
    print(f"final precision: {traj.best_precision[-1]:.6g}")
    marks = [0, args.budget // 4, args.budget // 2, args.budget - 1]
    for i in marks:
        print(f"  after {i + 1:4d} evals: best precision {traj.best_precision[i]:.6g}")

    bounds = AoccBounds(budget=args.budget)
    direct = aocc(traj, bounds)
    print(f"\narea-over-convergence score: {direct:.6f}")

    print("\nattainment-curve area vs target grid resolution:")
    for n_targets in (11, 101, 1001):
        curve = eaf([traj], bounds, n_targets=n_targets)
        area = eaf_auc(curve)
        print(f"  {n_targets:5d} targets: {area:.6f}  (gap {abs(area - direct):.2e})")


if __name__ == "__main__":
    main()
