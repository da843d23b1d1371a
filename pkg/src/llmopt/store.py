"""Session persistence, experiment configuration, and result file formats.

A session directory holds one evolution run: `manifest.json` (written
before the first iteration, immutable afterwards), `iterations.jsonl`
(append-only, one canonical JSON object per evaluated candidate, indices
contiguous from 0), `recordings/` (gateway transcripts) and
`analytics.csv`. Everything downstream (resume, replay, analytics) is a
pure function of these files.

Benchmark results use a run-length encoded trajectory CSV - one row per
improvement point plus a final row - which is lossless for best-so-far
traces and far smaller than one row per evaluation.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import diff_ratio, jaro
from .benchmarks import BOUNDS, FUNCTION_NAMES, make_instance
from .evolution import Candidate, IterationOutcome, LoopConfig, Strategy
from .gateway import ConfigError

GATEWAY_MODES = ("live", "mock", "replay")
EXECUTOR_KINDS = ("subprocess", "inprocess")
DEFAULT_ENDPOINT = "https://api.openai.com/v1/chat/completions"


@dataclass(frozen=True)
class GatewaySettings:
    """Where generations come from; the credential itself stays in the env."""

    model: str = "gpt-4-turbo"
    endpoint_url: str = DEFAULT_ENDPOINT
    api_key_env: str = "OPENAI_API_KEY"
    mock_script: str | None = None
    recording: str | None = None


@dataclass(frozen=True)
class ExecutorSettings:
    kind: str = "subprocess"
    shim_cmd: tuple | None = None

    def __post_init__(self):
        if self.kind not in EXECUTOR_KINDS:
            raise ConfigError(f"executor.kind: must be one of {EXECUTOR_KINDS}, got {self.kind!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    loop: LoopConfig = LoopConfig()
    gateway: GatewaySettings = GatewaySettings()
    executor: ExecutorSettings = ExecutorSettings()


def _expand_indices(value, label):
    """3 -> (1, 2, 3); an explicit list passes through."""
    if isinstance(value, bool):
        raise ConfigError(f"{label}: expected an integer count or a list")
    if isinstance(value, int):
        if value < 1:
            raise ConfigError(f"{label}: count must be >= 1, got {value}")
        return tuple(range(1, value + 1))
    if isinstance(value, (list, tuple)):
        return tuple(int(v) for v in value)
    raise ConfigError(f"{label}: expected an integer count or a list, got {type(value).__name__}")


def _build_section(cls, data: dict, section: str, **extra):
    allowed = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"{section}: unknown keys {sorted(unknown)}; allowed: {sorted(allowed)}")
    try:
        return cls(**data, **extra)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{section}: {exc}")


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse and validate the single-JSON experiment description.

    Sections: "loop" (iteration/evaluation sizing), "strategy"
    (mode, detailed_feedback), "gateway", "executor". Every omitted value
    falls back to the published experiment defaults.
    """
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    except ValueError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    known = {"loop", "strategy", "gateway", "executor"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config sections {sorted(unknown)}; allowed: {sorted(known)}")

    strategy = _build_section(Strategy, raw.get("strategy", {}), "strategy")

    loop_data = dict(raw.get("loop", {}))
    for key in ("instances", "seeds"):
        if key in loop_data:
            loop_data[key] = _expand_indices(loop_data[key], f"loop.{key}")
    if "fids" in loop_data:
        loop_data["fids"] = tuple(int(v) for v in loop_data["fids"])
    loop = _build_section(LoopConfig, loop_data, "loop", strategy=strategy)

    gateway = _build_section(GatewaySettings, raw.get("gateway", {}), "gateway")

    executor_data = dict(raw.get("executor", {}))
    if executor_data.get("shim_cmd") is not None:
        executor_data["shim_cmd"] = tuple(str(v) for v in executor_data["shim_cmd"])
    executor = _build_section(ExecutorSettings, executor_data, "executor")
    return ExperimentConfig(loop=loop, gateway=gateway, executor=executor)


# ---------------------------------------------------------------------------
# session records
# ---------------------------------------------------------------------------


def canonical_line(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def outcome_record(
    outcome: IterationOutcome,
    strategy: Strategy,
    parent_name: str | None = None,
    parent_code: str | None = None,
    timestamp: float | None = None,
) -> dict:
    cand = outcome.candidate
    usage = outcome.usage
    record = {
        "iteration": cand.iteration,
        "timestamp": float(time.time() if timestamp is None else timestamp),
        "strategy": {"mode": strategy.mode, "detailed_feedback": strategy.detailed_feedback},
        "candidate": {
            "id": cand.id,
            "name": cand.name,
            "code": cand.code,
            "mean": cand.mean,
            "std": cand.std,
            "error": cand.error_text,
            "per_group_mean": list(cand.per_group_mean) if cand.per_group_mean else None,
            "per_group_std": list(cand.per_group_std) if cand.per_group_std else None,
        },
        "parent_id": cand.parent_id,
        "gateway": {
            "prompt_tokens": usage.prompt_tokens,
            "completion_tokens": usage.completion_tokens,
            "format_retries": usage.format_retries,
        },
        "diff_ratio": None if parent_code is None else diff_ratio(parent_code, cand.code),
        "jaro": None if parent_name is None else jaro(parent_name, cand.name),
    }
    return record


def record_to_candidate(record: dict) -> Candidate:
    c = record["candidate"]
    return Candidate(
        id=c["id"],
        name=c["name"],
        code=c["code"],
        mean=c["mean"],
        std=c["std"],
        error_text=c["error"],
        per_group_mean=tuple(c["per_group_mean"]) if c["per_group_mean"] else None,
        per_group_std=tuple(c["per_group_std"]) if c["per_group_std"] else None,
        parent_id=record["parent_id"],
        iteration=record["iteration"],
    )


class SessionStore:
    """Owns one session directory; all writes funnel through here."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        (self.directory / "recordings").mkdir(exist_ok=True)

    @property
    def manifest_path(self) -> Path:
        return self.directory / "manifest.json"

    @property
    def iterations_path(self) -> Path:
        return self.directory / "iterations.jsonl"

    @property
    def analytics_path(self) -> Path:
        return self.directory / "analytics.csv"

    @property
    def recording_path(self) -> Path:
        return self.directory / "recordings" / "gateway.jsonl"

    def records(self) -> list[dict]:
        if not self.iterations_path.exists():
            return []
        lines = self.iterations_path.read_text().splitlines()
        return [json.loads(line) for line in lines if line.strip()]

    def count(self) -> int:
        return len(self.records())

    def load_candidates(self) -> list[Candidate]:
        return [record_to_candidate(r) for r in self.records()]

    def write_manifest(self, manifest: dict) -> None:
        """First write wins; a rewrite must match (creation time excluded)."""
        if self.manifest_path.exists():
            existing = json.loads(self.manifest_path.read_text())
            normalized = json.loads(json.dumps(manifest))
            a = {k: v for k, v in existing.items() if k != "created_at"}
            b = {k: v for k, v in normalized.items() if k != "created_at"}
            if a != b:
                raise ConfigError(
                    f"manifest at {self.manifest_path} differs from the current config; "
                    "refusing to overwrite an existing session"
                )
            return
        self.manifest_path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")

    def read_manifest(self) -> dict:
        return json.loads(self.manifest_path.read_text())

    def append(self, record: dict) -> None:
        expected = self.count()
        if record["iteration"] != expected:
            raise ConfigError(
                f"iteration records must be contiguous: expected {expected}, "
                f"got {record['iteration']}"
            )
        with self.iterations_path.open("a") as fh:
            fh.write(canonical_line(record) + "\n")

    def append_outcome(self, outcome: IterationOutcome, strategy: Strategy) -> dict:
        parent_name = parent_code = None
        parent_id = outcome.candidate.parent_id
        if parent_id is not None:
            for record in self.records():
                if record["candidate"]["id"] == parent_id:
                    parent_name = record["candidate"]["name"]
                    parent_code = record["candidate"]["code"]
                    break
        record = outcome_record(outcome, strategy, parent_name, parent_code)
        self.append(record)
        return record


def normalized_iterations_bytes(path: str | Path) -> bytes:
    """The JSONL content with every timestamp zeroed, for determinism diffs."""
    out = []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        record["timestamp"] = 0.0
        out.append(canonical_line(record))
    return ("\n".join(out) + "\n").encode()


# ---------------------------------------------------------------------------
# manifest
# ---------------------------------------------------------------------------


def suite_digest(dimension: int, master_seed: int, instances) -> str:
    """Fingerprint of the benchmark suite as actually instantiated."""
    h = hashlib.sha256()
    h.update(repr(BOUNDS).encode())
    for fid in sorted(FUNCTION_NAMES):
        h.update(FUNCTION_NAMES[fid].encode())
        for iid in instances:
            inst = make_instance(fid, iid, dimension, master_seed)
            h.update(np.asarray(inst.shift).tobytes())
            h.update(np.asarray(inst.rotation).tobytes())
    return h.hexdigest()


def build_manifest(cfg: ExperimentConfig, gateway_mode: str) -> dict:
    if gateway_mode not in GATEWAY_MODES:
        raise ConfigError(f"gateway mode must be one of {GATEWAY_MODES}, got {gateway_mode!r}")
    return {
        "created_at": time.time(),
        "code_version": __version__,
        "gateway_mode": gateway_mode,
        "config": {
            "loop": dataclasses.asdict(cfg.loop),
            "gateway": dataclasses.asdict(cfg.gateway),
            "executor": dataclasses.asdict(cfg.executor),
        },
        "seed_derivation": "seed_sequence([master_seed, repetition, fid, iid, seed])",
        "suite_digest": suite_digest(cfg.loop.dimension, cfg.loop.master_seed, cfg.loop.instances),
    }


# ---------------------------------------------------------------------------
# trajectory CSVs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunTrace:
    fid: int
    iid: int
    seed: int
    best_precision: np.ndarray


TRAJECTORY_HEADER = ("fid", "iid", "seed", "evaluation_index", "best_precision")


def write_trajectory_csv(path: str | Path, runs) -> None:
    """Run-length encoded: improvement points plus a final row per run."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRAJECTORY_HEADER)
        for run in runs:
            values = np.asarray(run.best_precision, dtype=float)
            if values.size == 0:
                raise ConfigError(f"empty trace for run {(run.fid, run.iid, run.seed)}")
            for j in range(values.size):
                if j == 0 or values[j] != values[j - 1]:
                    writer.writerow((run.fid, run.iid, run.seed, j, repr(float(values[j]))))
            last = values.size - 1
            if last > 0 and values[last] == values[last - 1]:
                writer.writerow((run.fid, run.iid, run.seed, last, repr(float(values[last]))))


def load_trajectory_csv(path: str | Path) -> list[RunTrace]:
    groups: dict[tuple, list] = {}
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != TRAJECTORY_HEADER:
            raise ConfigError(f"unexpected trajectory header {header}")
        for fid, iid, seed, index, value in reader:
            key = (int(fid), int(iid), int(seed))
            groups.setdefault(key, []).append((int(index), float(value)))
    runs = []
    for (fid, iid, seed), points in groups.items():
        length = points[-1][0] + 1
        values = np.empty(length)
        for i, (start, value) in enumerate(points):
            stop = points[i + 1][0] if i + 1 < len(points) else length
            values[start:stop] = value
        values[points[-1][0]:] = points[-1][1]
        runs.append(RunTrace(fid, iid, seed, values))
    return runs
