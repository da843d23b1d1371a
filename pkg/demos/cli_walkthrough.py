#!/usr/bin/env python3
"""Exercise every CLI command in sequence inside a scratch directory.

evolve (mock gateway) -> analyze the session, then
benchmark (native optimizers) -> analyze the results -> report.

Same entry point the `llmopt` console script uses, called in-process so
the demo can show the exit codes. Everything lands under one scratch
root, printed at the end so you can poke around.

Usage:
    python demos/cli_walkthrough.py
"""

import json
import tempfile
from pathlib import Path

from llmopt.cli import main

RESPONSES = [
    (
        "# Name: Uniform Scout\n"
        "```python\n"
        "import numpy as np\n\n"
        "class UniformScout:\n"
        "    def __init__(self, budget, dim):\n"
        "        self.budget = budget\n"
        "        self.dim = dim\n\n"
        "    def __call__(self, f):\n"
        "        for _ in range(self.budget):\n"
        "            f(np.random.uniform(-5.0, 5.0, self.dim))\n"
        "```\n"
    ),
    (
        "# Name: Axis Walker\n"
        "```python\n"
        "import numpy as np\n\n"
        "class AxisWalker:\n"
        "    def __init__(self, budget, dim):\n"
        "        self.budget = budget\n"
        "        self.dim = dim\n\n"
        "    def __call__(self, f):\n"
        "        x = np.zeros(self.dim)\n"
        "        fx = f(x)\n"
        "        for i in range(self.budget - 1):\n"
        "            y = x.copy()\n"
        "            y[i % self.dim] += np.random.normal(0.0, 1.0)\n"
        "            y = np.clip(y, -5.0, 5.0)\n"
        "            fy = f(y)\n"
        "            if fy <= fx:\n"
        "                x, fx = y, fy\n"
        "```\n"
    ),
]


def run(label, argv):
    print(f"$ llmopt {' '.join(argv)}")
    code = main(argv)
    print(f"  -> exit {code}\n")
    assert code == 0, f"{label} failed"


def show_file(path, lines=6):
    print(f"--- {path.name} (first {lines} lines) ---")
    for line in path.read_text().splitlines()[:lines]:
        print(f"  {line}")
    print()


def main_demo():
    root = Path(tempfile.mkdtemp(prefix="walkthrough-"))
    script = root / "mock_script.json"
    script.write_text(json.dumps({"responses": RESPONSES}))

    config = root / "experiment.json"
    config.write_text(
        json.dumps(
            {
                "loop": {
                    "iterations": 1,
                    "repetitions": 2,
                    "budget": 150,
                    "dimension": 3,
                    "fids": [1, 12],
                    "instances": [1],
                    "seeds": [1],
                },
                "gateway": {"mock_script": str(script)},
                "executor": {"kind": "inprocess"},
            }
        )
    )

    session = root / "session"
    results = root / "results"

    run("evolve", ["evolve", "--config", str(config), "--gateway", "mock",
                   "--out", str(session)])
    run("analyze session", ["analyze", "--session", str(session)])
    show_file(session / "analytics.csv")

    run("benchmark", ["benchmark", "--optimizers", "erads,random_search",
                      "--dims", "3", "--instances", "1", "--seeds", "2",
                      "--budget", "300", "--out", str(results)])
    show_file(results / "summary.csv")

    run("analyze results", ["analyze", "--results", str(results)])
    run("report", ["report", "--results", str(results)])

    print(f"scratch root kept at {root}")


if __name__ == "__main__":
    main_demo()
