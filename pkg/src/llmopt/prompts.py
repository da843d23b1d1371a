"""Prompt construction and response parsing for the generation loop.

The task prompt states the job (design a metaheuristic for noiseless
black-box problems, one class with `__call__(self, f)`, budget-limited) and
embeds an example implementation. The feedback prompt prepends the task
prompt, lists every previously generated algorithm name with its mean score,
shows the selected algorithm in full with its measured quality, and closes
with the refine-or-redesign instruction. Both builders are pure: identical
inputs give identical bytes, pinned by golden fixtures.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .optimizers import RANDOM_SEARCH_TEMPLATE

CLOSING_INSTRUCTION = "Either refine or redesign to improve the algorithm."
FALLBACK_NAME = "UnnamedAlgorithm"

GROUP_LABELS = (
    "separable",
    "low or moderate conditioning",
    "high conditioning unimodal",
    "multimodal with strong global structure",
    "multimodal with weak global structure",
)

_TASK_TEMPLATE = """\
Your task is to design novel metaheuristic algorithms to solve black box optimization problems.
The optimization algorithm should handle a wide range of tasks, which is evaluated on a large test suite of noiseless functions.
Your task is to write the optimization algorithm in Python code.
The code should contain one function `def __call__(self, f)`, which should optimize the black box function `f` using `budget` function evaluations.
The f() can only be called as many times as the budget allows.
{sizing}An example of such code is as follows:
```
{example}
```
Give a novel heuristic algorithm to solve this task.
Give the response in the format:
# Name: <name of the algorithm>
# Code: <code>"""


class ParseError(ValueError):
    """Response did not contain extractable code."""


@dataclass(frozen=True)
class TaskPrompt:
    text: str

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class FeedbackPrompt:
    text: str

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class ParsedResponse:
    name: str
    code: str
    explanation: str | None = None


def build_task_prompt(
    example_code: str = RANDOM_SEARCH_TEMPLATE,
    budget: int | None = None,
    dimension: int | None = None,
) -> TaskPrompt:
    """Render the task prompt around an example implementation.

    When concrete run sizes are given they are stated in one extra sentence;
    by default the prompt speaks only of `budget`, as the template does.
    """
    if not example_code:
        raise ParseError("task prompt needs a non-empty example")
    sizing = ""
    if budget is not None and dimension is not None:
        sizing = f"In this session, `budget` is {budget} and the problem dimensionality is {dimension}.\n"
    elif budget is not None:
        sizing = f"In this session, `budget` is {budget}.\n"
    elif dimension is not None:
        sizing = f"In this session, the problem dimensionality is {dimension}.\n"
    text = _TASK_TEMPLATE.format(sizing=sizing, example=example_code.rstrip("\n"))
    return TaskPrompt(text)


def build_feedback_prompt(
    task: TaskPrompt | str,
    history: Iterable[tuple[str, float]],
    selected,
    detailed: bool = False,
) -> FeedbackPrompt:
    """Assemble the refinement prompt around one selected candidate.

    `selected` needs name/code/mean/std attributes; detailed mode renders the
    five per-group (mean, std) pairs from per_group_mean/per_group_std
    instead of the overall pair, and a non-empty error_text attribute is
    quoted verbatim. Ends with the literal closing instruction.
    """
    parts = [str(task), ""]
    parts.append("The list of all previously generated algorithms with their mean score is:")
    for name, score in history:
        parts.append(f"- {name}: {score:.4f}")
    parts.append("")
    parts.append("The algorithm selected to improve is:")
    parts.append("")
    parts.append(f"# Name: {selected.name}")
    parts.append("# Code:")
    parts.append("```python")
    parts.append(selected.code.rstrip("\n"))
    parts.append("```")
    parts.append("")
    if detailed:
        pg_mean: Sequence[float] = selected.per_group_mean
        pg_std: Sequence[float] = selected.per_group_std
        if pg_mean is None or pg_std is None:
            raise ParseError("detailed feedback needs per-group values on the candidate")
        parts.append("Mean and standard deviation of the score per function group:")
        for label, m, s in zip(GROUP_LABELS, pg_mean, pg_std):
            parts.append(f"- {label}: {m:.4f} ({s:.4f})")
    else:
        parts.append(
            f"Mean score: {selected.mean:.4f} (standard deviation {selected.std:.4f})."
        )
    error = getattr(selected, "error_text", None)
    if error:
        parts.append("")
        parts.append("Execution errors observed during evaluation:")
        parts.append(error)
    parts.append("")
    parts.append(CLOSING_INSTRUCTION)
    return FeedbackPrompt("\n".join(parts))


_NAME_LINE = re.compile(r"(?im)^[#*\s]*name\b[\s*]*[:\-][ \t]*(.+)$")
_HEADING = re.compile(r"(?m)^#{1,6}[ \t]+(.+)$")
_FENCE = re.compile(r"```[^\n]*\n(.*?)```", re.S)
_CODE_MARKER = re.compile(r"(?im)^[#*\s]*code\b[\s*]*[:\-][ \t]*")


def _clean_name(raw: str) -> str:
    name = raw.strip().strip("`*_").strip()
    return name.rstrip(".").strip()


def parse_response(text: str) -> ParsedResponse:
    """Extract (name, code, explanation) from a model response.

    Code comes from the first fenced block, or failing that everything after
    a `# Code:` marker; no code at all raises ParseError. The name comes
    from a `# Name:` line, falling back to the first markdown heading, then
    to a fixed placeholder. Remaining prose is kept as the explanation.
    """
    code = None
    without_code = text
    fence = _FENCE.search(text)
    if fence:
        code = fence.group(1).strip("\n")
        without_code = text[: fence.start()] + text[fence.end():]
    else:
        marker = _CODE_MARKER.search(text)
        if marker:
            code = text[marker.end():].strip().strip("`").strip()
            without_code = text[: marker.start()]
    if not code:
        raise ParseError("no code block found in response")

    name = ""
    name_match = _NAME_LINE.search(without_code)
    if name_match:
        name = _clean_name(name_match.group(1))
        without_code = (
            without_code[: name_match.start()] + without_code[name_match.end():]
        )
    if not name:
        for heading in _HEADING.finditer(without_code):
            candidate = _clean_name(heading.group(1))
            if candidate and not candidate.lower().startswith("code"):
                name = candidate
                without_code = (
                    without_code[: heading.start()] + without_code[heading.end():]
                )
                break
    if not name:
        name = FALLBACK_NAME

    explanation = re.sub(_CODE_MARKER, "", without_code).strip() or None
    return ParsedResponse(name=name, code=code, explanation=explanation)


def render_response(name: str, code: str, explanation: str | None = None) -> str:
    """Canonical response form; parse_response inverts it."""
    body = f"# Name: {name}\n# Code:\n```python\n{code}\n```"
    if explanation:
        body += f"\n{explanation}"
    return body


def format_reminder(original_prompt: str) -> str:
    """Re-prompt text used when a response could not be parsed."""
    return (
        original_prompt
        + "\n\nYour previous response did not follow the required format."
        + " Respond exactly in the format:\n# Name: <name of the algorithm>\n# Code: <code>"
    )
