#!/usr/bin/env python3
"""Walk the benchmark suite: 24 functions, 5 groups, seeded instancing.

Shows the full function table, verifies that the optimum of a freshly
built instance evaluates to its stored f_opt, and demonstrates that the
budget-enforcing evaluator cuts a run off at exactly B evaluations.

Usage:
    python demos/tour_the_suite.py
"""

import numpy as np

from llmopt.benchmarks import (
    BOUNDS,
    BudgetExhausted,
    BudgetedEvaluator,
    FUNCTION_IDS,
    FUNCTION_NAMES,
    evaluate,
    group_name,
    make_instance,
    optimum_point,
)


def main():
    print(f"search box: [{BOUNDS[0]}, {BOUNDS[1]}]^d\n")

    print("fid  function                        group")
    print("---  ------------------------------  -----")
    for fid in FUNCTION_IDS:
        print(f"{fid:3d}  {FUNCTION_NAMES[fid]:<30s}  {group_name(fid)}")

    print("\noptimum check (f(x_opt) - f_opt should be ~0):")
    for fid in (1, 6, 12, 17, 23):
        inst = make_instance(fid, iid=3, d=5)
        gap = evaluate(inst, optimum_point(inst)) - inst.f_opt
        print(f"  f{fid:<2d} iid=3 d=5: residual {gap:.2e}")

    print("\nsame (fid, iid, d) twice gives the same instance:")
    a = make_instance(8, iid=1, d=4)
    b = make_instance(8, iid=1, d=4)
    print(f"  shifts identical:    {np.array_equal(a.shift, b.shift)}")
    print(f"  rotations identical: {np.array_equal(a.rotation, b.rotation)}")

    print("\nbudget enforcement:")
    ev = BudgetedEvaluator(make_instance(3, iid=1, d=4), budget=10)
    rng = np.random.default_rng(7)
    spent = 0
    try:
        while True:
            ev.spend(rng.uniform(-5, 5, 4))
            spent += 1
    except BudgetExhausted:
        pass
    print(f"  asked for unlimited evaluations, got {spent} (budget was 10)")
    print(f"  best precision so far: {ev.best_precision_trace[-1]:.4g}")


if __name__ == "__main__":
    main()
