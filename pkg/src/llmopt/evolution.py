"""The (1+,1) evolution loop: one parent, one offspring per iteration.

An LLM writes the first optimizer from the task prompt, then T times in a
row is shown the session so far plus one selected parent and asked to
refine or redesign it. Scores come from running the generated code over
the full benchmark suite, repeated k times; any execution error zeroes the
candidate's score and the error text is fed back in the next prompt.

Parent selection is the only difference between the two strategies: the
elitist mode always mutates the best candidate so far, the non-elitist
mode always mutates the latest one. Best tracking itself is shared and
ties go to the newcomer.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field

import numpy as np

from .benchmarks import DomainError, FUNCTION_NAMES
from .executor import ExecutionSpec
from .gateway import ChatRequest
from .metrics import QualityReport, aocc, AoccBounds, quality
from .optimizers import RANDOM_SEARCH_TEMPLATE
from .prompts import (
    FALLBACK_NAME,
    ParseError,
    build_feedback_prompt,
    build_task_prompt,
    format_reminder,
    parse_response,
)

PLUS_ONE = "plus_one"
COMMA_ONE = "comma_one"
STRATEGY_MODES = (PLUS_ONE, COMMA_ONE)
FORMAT_RETRY_CAP = 2


@dataclass(frozen=True)
class Strategy:
    mode: str = PLUS_ONE
    detailed_feedback: bool = False

    def __post_init__(self):
        if self.mode not in STRATEGY_MODES:
            raise DomainError(f"mode must be one of {STRATEGY_MODES}, got {self.mode!r}")


@dataclass
class Candidate:
    """One generated optimizer with its evaluated quality."""

    id: str
    name: str
    code: str
    mean: float = 0.0
    std: float = 0.0
    error_text: str | None = None
    per_group_mean: tuple | None = None
    per_group_std: tuple | None = None
    parent_id: str | None = None
    iteration: int = 0

    def __post_init__(self):
        if self.error_text and self.mean != 0.0:
            raise DomainError("a candidate with an error must score 0")

    def apply_report(self, report: QualityReport) -> None:
        self.mean = report.mean
        self.std = report.std
        self.error_text = report.error_text
        self.per_group_mean = report.per_group_mean
        self.per_group_std = report.per_group_std
        if self.error_text and self.mean != 0.0:
            raise DomainError("a candidate with an error must score 0")


@dataclass
class SessionHistory:
    """Names and scores of everything evaluated, plus the best snapshot."""

    entries: list = field(default_factory=list)
    best: Candidate | None = None

    def record(self, candidate: Candidate) -> None:
        self.entries.append((candidate.name, candidate.mean))
        self.best = update_best(self.best, candidate)


def update_best(best: Candidate | None, new: Candidate) -> Candidate:
    """Ties replace: a newcomer matching the best score becomes the best."""
    if best is None or new.mean >= best.mean:
        return new
    return best


def select_parent(history: SessionHistory, last: Candidate | None, strategy: Strategy) -> Candidate:
    if history.best is None or last is None:
        raise DomainError("cannot select a parent before any candidate was evaluated")
    return history.best if strategy.mode == PLUS_ONE else last


@dataclass(frozen=True)
class LoopConfig:
    iterations: int = 100
    repetitions: int = 5
    budget: int = 10_000
    dimension: int = 5
    fids: tuple = tuple(FUNCTION_NAMES)
    instances: tuple = (1, 2, 3)
    seeds: tuple = (1, 2, 3)
    master_seed: int = 0
    timeout_s: float = 60.0
    strategy: Strategy = Strategy()
    workers: int = 1

    def __post_init__(self):
        if self.iterations < 1:
            raise DomainError(f"iterations must be >= 1, got {self.iterations}")
        if self.repetitions < 1:
            raise DomainError(f"repetitions must be >= 1, got {self.repetitions}")
        if not self.fids or not self.instances or not self.seeds:
            raise DomainError("fids, instances and seeds must all be non-empty")
        if self.workers < 1:
            raise DomainError(f"workers must be >= 1, got {self.workers}")


def run_seed_for(master_seed: int, repetition: int, fid: int, iid: int, seed: int) -> int:
    """Stable per-run seed derived from the full run coordinates."""
    ss = np.random.SeedSequence([master_seed, repetition, fid, iid, seed])
    return int(ss.generate_state(1)[0])


def _spec(cand_code: str, cfg: LoopConfig, fid: int, iid: int, run_seed: int) -> ExecutionSpec:
    return ExecutionSpec(
        code=cand_code,
        dimension=cfg.dimension,
        budget=cfg.budget,
        fid=fid,
        iid=iid,
        run_seed=run_seed,
        master_seed=cfg.master_seed,
        timeout_s=cfg.timeout_s,
    )


def score_candidate(candidate: Candidate, cfg: LoopConfig, executor) -> QualityReport:
    """Run the candidate k times over the whole suite and aggregate.

    A cheap probe run goes first: code that cannot even load fails there
    and skips the sweep entirely. Any execution error anywhere in the
    sweep zeroes the score and captures the first error text, so an
    erroring candidate never outranks a working one.
    """
    probe_fid, probe_iid, probe_seed = cfg.fids[0], cfg.instances[0], cfg.seeds[0]
    probe = executor.execute(
        _spec(candidate.code, cfg, probe_fid, probe_iid,
              run_seed_for(cfg.master_seed, 0, probe_fid, probe_iid, probe_seed))
    )
    if probe.failed_before_first_evaluation:
        return QualityReport(mean=0.0, std=0.0, error_text=probe.error)

    coords = [
        (rep, fid, iid, seed)
        for rep in range(cfg.repetitions)
        for fid in cfg.fids
        for iid in cfg.instances
        for seed in cfg.seeds
    ]

    def one(coord):
        rep, fid, iid, seed = coord
        run_seed = run_seed_for(cfg.master_seed, rep, fid, iid, seed)
        return coord, executor.execute(_spec(candidate.code, cfg, fid, iid, run_seed))

    outcomes = {}
    if cfg.workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            for coord, outcome in pool.map(one, coords):
                outcomes[coord] = outcome
    else:
        for coord in coords:
            coord, outcome = one(coord)
            outcomes[coord] = outcome

    failed = [c for c in coords if outcomes[c].error]
    if failed:
        first = outcomes[failed[0]].error
        if len(failed) > 1:
            first += f" ({len(failed)} of {len(coords)} runs failed)"
        return QualityReport(mean=0.0, std=0.0, error_text=first)

    bounds = AoccBounds(budget=cfg.budget)
    repetitions = []
    for rep in range(cfg.repetitions):
        cells = {}
        for fid in cfg.fids:
            for iid in cfg.instances:
                per_seed = [
                    aocc(outcomes[(rep, fid, iid, seed)].trajectory, bounds)
                    for seed in cfg.seeds
                ]
                cells[(fid, iid)] = float(np.mean(per_seed))
        repetitions.append(cells)
    return quality(
        repetitions,
        detailed=cfg.strategy.detailed_feedback,
        instances=cfg.instances,
        fids=cfg.fids,
    )


@dataclass(frozen=True)
class GenerationResult:
    """One successful generation: the parsed candidate plus gateway usage."""

    name: str
    code: str
    prompt_tokens: int
    completion_tokens: int
    format_retries: int


def generate(gateway, prompt_text: str, model: str | None = None) -> GenerationResult:
    """One generation call with format-enforcement retries.

    A response that cannot be parsed triggers a re-prompt quoting the
    original prompt plus a format reminder, at most FORMAT_RETRY_CAP times;
    past the cap the result carries empty code (which will score 0).
    """
    prompt_tokens = 0
    completion_tokens = 0
    text = prompt_text
    for attempt in range(FORMAT_RETRY_CAP + 1):
        request = ChatRequest.user(text) if model is None else ChatRequest.user(text, model=model)
        response = gateway.complete(request)
        prompt_tokens += response.prompt_tokens
        completion_tokens += response.completion_tokens
        try:
            parsed = parse_response(response.content)
        except ParseError:
            text = format_reminder(prompt_text)
            continue
        return GenerationResult(parsed.name, parsed.code, prompt_tokens, completion_tokens, attempt)
    return GenerationResult(FALLBACK_NAME, "", prompt_tokens, completion_tokens, FORMAT_RETRY_CAP)


def _evaluate(candidate: Candidate, cfg: LoopConfig, executor) -> None:
    if not candidate.code:
        candidate.error_text = "response format not followed: no code block produced"
        return
    candidate.apply_report(score_candidate(candidate, cfg, executor))


@dataclass(frozen=True)
class IterationOutcome:
    """What one loop step produced, as handed to the persistence hook."""

    candidate: Candidate
    usage: GenerationResult


def run_evolution(
    cfg: LoopConfig,
    gateway,
    executor,
    on_iteration=None,
    example_code: str = RANDOM_SEARCH_TEMPLATE,
    model: str | None = None,
    completed: list | None = None,
):
    """Algorithm: init one candidate, then T select-mutate-evaluate steps.

    `on_iteration(IterationOutcome)` is called after every evaluated
    candidate, init included; it is the persistence hook. If the gateway
    dies mid-session the exception propagates after the hook has seen all
    finished iterations, so a caller can checkpoint and resume by passing
    the already-evaluated candidates back via `completed` (ordered by
    iteration, as rebuilt from the session log).

    Returns (best candidate, session history).
    """
    task = build_task_prompt(example_code, budget=cfg.budget, dimension=cfg.dimension)
    history = SessionHistory()
    last: Candidate | None = None
    start = 0

    for candidate in completed or []:
        history.record(candidate)
        last = candidate
        start = candidate.iteration + 1

    if last is None:
        usage = generate(gateway, task.text, model)
        candidate = Candidate(id="i0000", name=usage.name, code=usage.code, iteration=0)
        _evaluate(candidate, cfg, executor)
        history.record(candidate)
        last = candidate
        if on_iteration:
            on_iteration(IterationOutcome(candidate, usage))
        start = 1

    for t in range(start, cfg.iterations + 1):
        parent = select_parent(history, last, cfg.strategy)
        # An errored parent has no per-group breakdown; fall back to the
        # plain mean/std line rather than refusing to build the prompt.
        detailed = cfg.strategy.detailed_feedback and parent.per_group_mean is not None
        feedback = build_feedback_prompt(task, history.entries, parent, detailed=detailed)
        usage = generate(gateway, feedback.text, model)
        candidate = Candidate(
            id=f"i{t:04d}",
            name=usage.name,
            code=usage.code,
            parent_id=parent.id,
            iteration=t,
        )
        _evaluate(candidate, cfg, executor)
        history.record(candidate)
        last = candidate
        if on_iteration:
            on_iteration(IterationOutcome(candidate, usage))

    return history.best, history
