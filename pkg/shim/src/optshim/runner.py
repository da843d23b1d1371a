"""The protocol worker: load candidate code, proxy its evaluations.

Message shapes, one JSON object per line, UTF-8:

    host -> worker   {"init": {"dim": d, "budget": B, "bounds": [lo, hi],
                               "seed": s, "code": "..."}}
    worker -> host   {"eval": {"x": [f, ...]}}
    host -> worker   {"y": value} or {"exhausted": true}
    worker -> host   {"done": {"evals": n}}
                     {"error": {"phase": "load"|"run", "message": "..."}}

Candidate failures are part of normal operation and exit 0 after an error
message; a host that breaks the contract (unparseable line, missing init,
closed pipe mid-session) makes the worker exit nonzero instead.
"""

from __future__ import annotations

import inspect
import json
import random
import sys
import traceback

import numpy as np

PROTOCOL_EXIT = 7


class BudgetExhausted(RuntimeError):
    """Raised into the candidate when the host refuses further evaluations."""


class ProtocolFailure(RuntimeError):
    """The host side broke the message contract; not a candidate error."""


class CandidateLoadError(Exception):
    pass


def find_entry_point(namespace: dict) -> type:
    """The single top-level class whose own body defines __call__(self, f)."""
    matches = []
    for name, obj in namespace.items():
        if not inspect.isclass(obj) or "__call__" not in vars(obj):
            continue
        params = [
            p for p in inspect.signature(obj.__call__).parameters.values()
            if p.kind in (p.POSITIONAL_ONLY, p.POSITIONAL_OR_KEYWORD)
        ]
        if len(params) == 2:
            matches.append((name, obj))
    if not matches:
        raise CandidateLoadError("no top-level class with __call__(self, f) found")
    if len(matches) > 1:
        names = ", ".join(sorted(name for name, _ in matches))
        raise CandidateLoadError(f"ambiguous entry point, candidates: {names}")
    return matches[0][1]


def construct_candidate(cls: type, budget: int, dim: int):
    """budget/dim as keywords when the constructor accepts them, else positional."""
    try:
        params = inspect.signature(cls.__init__).parameters
    except (TypeError, ValueError):
        params = {}
    kwargs = {}
    if "budget" in params:
        kwargs["budget"] = budget
    if "dim" in params:
        kwargs["dim"] = dim
    if kwargs:
        return cls(**kwargs)
    return cls(budget, dim)


class HostProxy:
    """The callable handed to the candidate; one eval request per call."""

    def __init__(self, reader, writer):
        self.reader = reader
        self.writer = writer
        self.evals = 0

    def send(self, obj) -> None:
        try:
            self.writer.write(json.dumps(obj) + "\n")
            self.writer.flush()
        except (BrokenPipeError, ValueError):
            raise ProtocolFailure("host closed the pipe")

    def __call__(self, x):
        point = [float(v) for v in np.atleast_1d(np.asarray(x, dtype=float))]
        self.send({"eval": {"x": point}})
        line = self.reader.readline()
        if not line:
            raise ProtocolFailure("host closed the pipe mid-session")
        try:
            reply = json.loads(line)
        except ValueError:
            raise ProtocolFailure(f"unparseable reply from host: {line[:200]!r}")
        if not isinstance(reply, dict):
            raise ProtocolFailure(f"unexpected reply from host: {line[:200]!r}")
        if "y" in reply:
            self.evals += 1
            return float(reply["y"])
        if reply.get("exhausted") is True:
            raise BudgetExhausted("evaluation budget used up")
        raise ProtocolFailure(f"unexpected reply from host: {line[:200]!r}")


def _read_init(reader) -> dict:
    line = reader.readline()
    if not line:
        raise ProtocolFailure("no init message")
    try:
        msg = json.loads(line)
    except ValueError:
        raise ProtocolFailure(f"unparseable init line: {line[:200]!r}")
    if not isinstance(msg, dict) or not isinstance(msg.get("init"), dict):
        raise ProtocolFailure(f"expected an init message, got: {line[:200]!r}")
    init = msg["init"]
    for key, kind in (("dim", int), ("budget", int), ("seed", int), ("code", str)):
        if not isinstance(init.get(key), kind):
            raise ProtocolFailure(f"init message lacks a valid {key!r}")
    return init


def _session(reader, writer) -> int:
    init = _read_init(reader)
    proxy = HostProxy(reader, writer)

    # Candidates routinely use module-level RNGs; seeding them here is what
    # makes a rerun with the same init message reproducible.
    np.random.seed(init["seed"] % 2**32)
    random.seed(init["seed"])

    try:
        namespace: dict = {"__name__": "candidate"}
        exec(compile(init["code"], "<candidate>", "exec"), namespace)
        cls = find_entry_point(namespace)
        instance = construct_candidate(cls, init["budget"], init["dim"])
    except CandidateLoadError as exc:
        proxy.send({"error": {"phase": "load", "message": str(exc)}})
        return 0
    except BaseException:
        proxy.send({"error": {"phase": "load", "message": traceback.format_exc()}})
        return 0

    try:
        instance(proxy)
    except BudgetExhausted:
        pass  # normal termination: the candidate ran the budget dry
    except ProtocolFailure:
        raise
    except BaseException:
        proxy.send({"error": {"phase": "run", "message": traceback.format_exc()}})
        return 0

    proxy.send({"done": {"evals": proxy.evals}})
    return 0


def run_session(reader, writer) -> int:
    try:
        return _session(reader, writer)
    except ProtocolFailure as exc:
        print(f"optshim: {exc}", file=sys.stderr)
        return PROTOCOL_EXIT


def main() -> int:
    return run_session(sys.stdin, sys.stdout)
