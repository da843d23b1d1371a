#!/usr/bin/env python3
"""Run the full evolution loop offline, with a scripted stand-in for the LLM.

The mock gateway plays back three canned responses: a deliberately broken
candidate, a uniform sampler, and a shrinking-step hill climber. The loop
scores each one on a tiny slice of the suite, records the failure as a
zero, and keeps the best. No network, no API key, runs in a few seconds.

Usage:
    python demos/mock_evolution.py
"""

from llmopt.evolution import LoopConfig, Strategy, run_evolution
from llmopt.executor import InProcessExecutor
from llmopt.gateway import MockGateway

BROKEN = """\
# Name: BrokenCompass
```python
class BrokenCompass:
    def __init__(self, budget, dim)
        pass
```
"""

SAMPLER = """\
# Name: UniformScout
```python
import numpy as np

class UniformScout:
    def __init__(self, budget, dim):
        self.budget = budget
        self.dim = dim

    def __call__(self, f):
        for _ in range(self.budget):
            f(np.random.uniform(-5.0, 5.0, self.dim))
```
"""

CLIMBER = """\
# Name: ShrinkingStepClimber
```python
import numpy as np

class ShrinkingStepClimber:
    def __init__(self, budget, dim):
        self.budget = budget
        self.dim = dim

    def __call__(self, f):
        x = np.random.uniform(-5.0, 5.0, self.dim)
        fx = f(x)
        step = 2.0
        for i in range(self.budget - 1):
            y = np.clip(x + np.random.normal(0.0, step, self.dim), -5.0, 5.0)
            fy = f(y)
            if fy <= fx:
                x, fx = y, fy
            step *= 0.995
```
"""


def main():
    cfg = LoopConfig(
        iterations=2,
        repetitions=2,
        budget=400,
        dimension=3,
        fids=(1, 8, 15),
        instances=(1,),
        seeds=(1, 2),
        strategy=Strategy(mode="plus_one"),
    )
    gateway = MockGateway([BROKEN, SAMPLER, CLIMBER])
    executor = InProcessExecutor()

    def show(outcome):
        c = outcome.candidate
        status = f"score {c.mean:.4f} ± {c.std:.4f}"
        if c.error_text:
            status = f"failed ({c.error_text.splitlines()[-1]})"
        parent = c.parent_id or "task prompt"
        print(f"iteration {c.iteration}: {c.name:<22s} from {parent:<12s} {status}")

    print("seeding plus one refinement, 2 iterations, budget 400 on f1/f8/f15\n")
    best, history = run_evolution(cfg, gateway, executor, on_iteration=show)

    print(f"\nbest candidate: {best.name} at {best.mean:.4f}")
    print("history as the next prompt would list it:")
    for name, mean in history.entries:
        print(f"  - {name}: {mean:.4f}")


if __name__ == "__main__":
    main()
