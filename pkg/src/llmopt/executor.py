"""Runs candidate optimizers against one problem instance under budget.

Three execution routes with one outcome shape:

* `SubprocessExecutor` speaks the line protocol with a shim process that
  hosts the candidate code. Objective values never leave the host: the shim
  sends evaluation points, the host answers with values from its own
  BudgetedEvaluator, so budget enforcement stays authoritative here no
  matter what the candidate does.
* `InProcessExecutor` loads candidate code in this interpreter with the
  same discovery and error semantics (no wall-clock enforcement; meant for
  tests and trusted code).
* `NativeExecutor` routes the built-in optimizers through the identical
  outcome shape so baselines flow through one scoring pipeline.

Line protocol (newline-delimited JSON, UTF-8, one object per line):
host sends {"init": {"dim", "budget", "bounds", "seed", "code"}}; the shim
asks {"eval": {"x": [...]}} and is answered {"y": value} or
{"exhausted": true}; the shim finishes with {"done": {...}} or
{"error": {"phase": "load"|"run", "message": ...}}.
"""

from __future__ import annotations

import inspect
import json
import queue
import subprocess
import sys
import threading
import time
import traceback
from dataclasses import dataclass

import numpy as np

from .benchmarks import (
    BOUNDS,
    BudgetedEvaluator,
    BudgetExhausted,
    DomainError,
    make_instance,
)
from .metrics import Trajectory
from .optimizers import EradsParams, OPTIMIZER_IDS, run_named

ERROR_TEXT_CAP = 4096
STDERR_CAP = 65536
DEFAULT_TIMEOUT_S = 60.0
DEFAULT_SHIM_CMD = (sys.executable, "-m", "optshim")


@dataclass(frozen=True)
class ExecutionSpec:
    """One run: candidate code against (fid, iid, dimension) under budget."""

    code: str
    dimension: int
    budget: int
    fid: int
    iid: int
    run_seed: int = 0
    master_seed: int = 0
    timeout_s: float = DEFAULT_TIMEOUT_S

    def __post_init__(self):
        if self.budget < 1:
            raise DomainError(f"budget must be >= 1, got {self.budget}")
        if self.timeout_s <= 0:
            raise DomainError(f"timeout must be positive, got {self.timeout_s}")


@dataclass(frozen=True)
class ExecutionOutcome:
    """Trajectory or error; errors after the first evaluation keep the trace."""

    trajectory: Trajectory | None
    error: str | None
    wall_time_s: float
    evals_billed: int = 0

    @property
    def failed_before_first_evaluation(self) -> bool:
        return self.error is not None and self.trajectory is None


def _cap(text: str, limit: int = ERROR_TEXT_CAP) -> str:
    return text if len(text) <= limit else text[: limit - 15] + "... [truncated]"


def _outcome(evaluator: BudgetedEvaluator, spec, error: str | None, started: float) -> ExecutionOutcome:
    trace = evaluator.best_precision_trace
    trajectory = None
    if trace:
        trajectory = Trajectory(
            np.asarray(trace), fid=spec.fid, iid=spec.iid, run_seed=spec.run_seed
        )
    if error is None and not trace:
        error = "run ended without any objective evaluation"
    return ExecutionOutcome(
        trajectory=trajectory,
        error=_cap(error) if error else None,
        wall_time_s=time.monotonic() - started,
        evals_billed=evaluator.used,
    )


def _fresh_evaluator(spec: ExecutionSpec) -> BudgetedEvaluator:
    instance = make_instance(spec.fid, spec.iid, spec.dimension, spec.master_seed)
    return BudgetedEvaluator(instance, spec.budget)


# ---------------------------------------------------------------------------
# subprocess route
# ---------------------------------------------------------------------------


class _LineReader(threading.Thread):
    """Pushes decoded stdout lines into a queue; None marks EOF."""

    def __init__(self, stream, sink: queue.Queue):
        super().__init__(daemon=True)
        self.stream = stream
        self.sink = sink

    def run(self):
        try:
            for line in self.stream:
                self.sink.put(line)
        except ValueError:
            pass  # stream closed under the reader during shutdown
        finally:
            self.sink.put(None)


class _StderrDrain(threading.Thread):
    def __init__(self, stream):
        super().__init__(daemon=True)
        self.stream = stream
        self.text = ""

    def run(self):
        try:
            for line in self.stream:
                if len(self.text) < STDERR_CAP:
                    self.text += line
        except ValueError:
            pass


class SubprocessExecutor:
    """Hosts the line protocol against a shim command (one process per run)."""

    def __init__(self, shim_cmd=DEFAULT_SHIM_CMD):
        self.shim_cmd = tuple(shim_cmd)

    def execute(self, spec: ExecutionSpec) -> ExecutionOutcome:
        started = time.monotonic()
        evaluator = _fresh_evaluator(spec)
        deadline = started + spec.timeout_s
        proc = subprocess.Popen(
            self.shim_cmd,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            text=True,
            encoding="utf-8",
            bufsize=1,
        )
        lines: queue.Queue = queue.Queue()
        _LineReader(proc.stdout, lines).start()
        stderr = _StderrDrain(proc.stderr)
        stderr.start()
        error: str | None = None
        try:
            init = {
                "init": {
                    "dim": spec.dimension,
                    "budget": spec.budget,
                    "bounds": list(BOUNDS),
                    "seed": spec.run_seed,
                    "code": spec.code,
                }
            }
            self._send(proc, init)
            while True:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    error = f"timeout after {spec.timeout_s:g}s"
                    break
                try:
                    line = lines.get(timeout=remaining)
                except queue.Empty:
                    error = f"timeout after {spec.timeout_s:g}s"
                    break
                if line is None:
                    proc.wait(timeout=5)
                    tail = stderr.text.strip()
                    error = f"shim exited with status {proc.returncode}"
                    if tail:
                        error += f": {tail}"
                    break
                finished, error = self._handle(line, proc, evaluator)
                if finished or error:
                    break
        except BrokenPipeError:
            proc.wait(timeout=5)
            tail = stderr.text.strip()
            error = f"shim closed the pipe (status {proc.returncode})"
            if tail:
                error += f": {tail}"
        finally:
            self._shutdown(proc)
        return _outcome(evaluator, spec, error, started)

    def _send(self, proc, obj) -> None:
        proc.stdin.write(json.dumps(obj) + "\n")
        proc.stdin.flush()

    def _handle(self, line: str, proc, evaluator) -> tuple[bool, str | None]:
        """Returns (session finished, error text)."""
        line = line.strip()
        if not line:
            return False, None
        try:
            msg = json.loads(line)
        except ValueError:
            return False, f"protocol: unparseable line from shim: {_cap(line, 200)!r}"
        if not isinstance(msg, dict):
            return False, f"protocol: expected an object, got {_cap(line, 200)!r}"
        if "eval" in msg:
            try:
                x = msg["eval"]["x"]
            except (TypeError, KeyError):
                return False, "protocol: malformed eval request"
            try:
                value = evaluator.spend(x)
            except BudgetExhausted:
                self._send(proc, {"exhausted": True})
                return False, None
            except DomainError as exc:
                return False, f"protocol: bad evaluation point ({exc})"
            self._send(proc, {"y": float(value)})
            return False, None
        if "done" in msg:
            return True, None
        if "error" in msg:
            detail = msg["error"] if isinstance(msg["error"], dict) else {}
            phase = detail.get("phase", "run")
            message = detail.get("message", "unspecified shim error")
            return True, f"[{phase}] {message}"
        return False, f"protocol: unknown message {_cap(line, 200)!r}"

    def _shutdown(self, proc) -> None:
        for stream in (proc.stdin,):
            try:
                stream.close()
            except OSError:
                pass
        if proc.poll() is None:
            proc.terminate()
            try:
                proc.wait(timeout=2)
            except subprocess.TimeoutExpired:
                proc.kill()
                proc.wait()


def execute(spec: ExecutionSpec, shim_cmd=DEFAULT_SHIM_CMD) -> ExecutionOutcome:
    return SubprocessExecutor(shim_cmd).execute(spec)


# ---------------------------------------------------------------------------
# in-process route
# ---------------------------------------------------------------------------


class CandidateLoadError(Exception):
    """Candidate code failed before it could be driven (compile/discover/init)."""


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
    """Instantiate with budget/dim keywords when accepted, positionally otherwise."""
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


class InProcessExecutor:
    """Same load/run semantics as the shim, inside this interpreter.

    No timeout enforcement is possible here; use the subprocess route for
    untrusted or possibly non-terminating code. Global RNGs are seeded from
    the run seed (and restored afterwards) so template-style candidates
    using module-level numpy randomness stay reproducible.
    """

    def execute(self, spec: ExecutionSpec) -> ExecutionOutcome:
        import random as _random

        started = time.monotonic()
        evaluator = _fresh_evaluator(spec)
        error = None
        np_state = np.random.get_state()
        py_state = _random.getstate()
        np.random.seed(spec.run_seed % 2**32)
        _random.seed(spec.run_seed)
        try:
            namespace: dict = {"__name__": "candidate"}
            try:
                exec(compile(spec.code, "<candidate>", "exec"), namespace)
                cls = find_entry_point(namespace)
                instance = construct_candidate(cls, spec.budget, spec.dimension)
            except CandidateLoadError as exc:
                error = f"[load] {exc}"
            except BaseException:
                error = f"[load] {traceback.format_exc()}"
            if error is None:
                try:
                    instance(evaluator.spend)
                except BudgetExhausted:
                    pass  # normal termination: candidate ran the budget dry
                except BaseException:
                    error = f"[run] {traceback.format_exc()}"
        finally:
            np.random.set_state(np_state)
            _random.setstate(py_state)
        return _outcome(evaluator, spec, error, started)


# ---------------------------------------------------------------------------
# native route
# ---------------------------------------------------------------------------


class NativeExecutor:
    """Runs a built-in optimizer through the standard outcome shape."""

    def __init__(self, optimizer_id: str, erads_params: EradsParams | None = None):
        if optimizer_id not in OPTIMIZER_IDS:
            raise DomainError(
                f"unknown optimizer {optimizer_id!r}; expected one of {OPTIMIZER_IDS}"
            )
        self.optimizer_id = optimizer_id
        self.erads_params = erads_params

    def execute(self, spec: ExecutionSpec) -> ExecutionOutcome:
        started = time.monotonic()
        evaluator = _fresh_evaluator(spec)
        run_named(self.optimizer_id, evaluator, spec.run_seed, self.erads_params)
        return _outcome(evaluator, spec, None, started)


def native_execute(
    optimizer_id: str, spec: ExecutionSpec, erads_params: EradsParams | None = None
) -> ExecutionOutcome:
    return NativeExecutor(optimizer_id, erads_params).execute(spec)
