"""Scripted stand-in for the real shim, driven over the line protocol.

Behavior is selected by the first line of the candidate code field, so the
host under test stays oblivious. Points sent back are deterministic from
the init seed. Not a real candidate runner; just enough protocol to
exercise every host-side branch.
"""

import json
import sys
import time

import numpy as np


def send(obj):
    sys.stdout.write(json.dumps(obj) + "\n")
    sys.stdout.flush()


def recv():
    line = sys.stdin.readline()
    if not line:
        sys.exit(7)
    return json.loads(line)


def main():
    init = recv()["init"]
    dim = init["dim"]
    budget = init["budget"]
    lo, hi = init["bounds"]
    rng = np.random.default_rng(init["seed"])
    behavior = init["code"].splitlines()[0].strip() if init["code"] else "normal"

    if behavior == "load-error":
        send({"error": {"phase": "load", "message": "SyntaxError: invalid syntax (<candidate>, line 3)"}})
        return
    if behavior == "hang":
        time.sleep(60)
        return
    if behavior == "die":
        sys.stderr.write("Fatal: segfault simulation\n")
        sys.stderr.flush()
        sys.exit(3)
    if behavior == "garbage":
        sys.stdout.write("this is not json\n")
        sys.stdout.flush()
        recv()
        return

    def ask(x):
        send({"eval": {"x": list(x)}})
        return recv()

    if behavior == "nan-point":
        ask([float("nan")] * dim)
        return
    if behavior == "wrong-dim":
        ask([0.0] * (dim + 1))
        return

    if behavior == "crash-mid":
        for _ in range(3):
            ask(rng.uniform(lo, hi, dim))
        send({"error": {"phase": "run", "message": "ZeroDivisionError: division by zero"}})
        return

    if behavior == "overrun":
        evals = 0
        while True:
            reply = ask(rng.uniform(lo, hi, dim))
            if "exhausted" in reply:
                break
            evals += 1
        send({"done": {"evals": evals}})
        return

    if behavior == "lazy":
        send({"done": {"evals": 0}})
        return

    # normal: spend exactly the advertised budget, then finish.
    for _ in range(budget):
        ask(rng.uniform(lo, hi, dim))
    send({"done": {"evals": budget}})


if __name__ == "__main__":
    main()
