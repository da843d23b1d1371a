"""Post-hoc analytics over evolution sessions.

Pure functions of the persisted iteration log: how much code changed between
parent and offspring (line diff ratio), how similar their names are (Jaro),
and which words the generated names are built from.
"""

from __future__ import annotations

import csv
import difflib
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path


def jaro(s: str, t: str) -> float:
    """Jaro similarity in [0, 1].

    Characters match when equal and at most floor(max(|s|,|t|)/2) - 1
    positions apart; the score is 0 without matches, otherwise the mean of
    m/|s|, m/|t| and (m - transpositions)/m, where transpositions are
    half the count of out-of-order matched pairs.
    """
    if not s or not t:
        return 0.0
    window = max(max(len(s), len(t)) // 2 - 1, 0)
    s_hit = [False] * len(s)
    t_hit = [False] * len(t)
    matches = 0
    for i, ch in enumerate(s):
        lo = max(0, i - window)
        hi = min(len(t), i + window + 1)
        for j in range(lo, hi):
            if not t_hit[j] and t[j] == ch:
                s_hit[i] = t_hit[j] = True
                matches += 1
                break
    if matches == 0:
        return 0.0
    s_matched = [ch for ch, hit in zip(s, s_hit) if hit]
    t_matched = [ch for ch, hit in zip(t, t_hit) if hit]
    half_transpositions = sum(a != b for a, b in zip(s_matched, t_matched))
    transpositions = half_transpositions / 2
    return (
        matches / len(s) + matches / len(t) + (matches - transpositions) / matches
    ) / 3


def diff_ratio(parent_code: str, child_code: str) -> float:
    """Changed-line count from an LCS line diff over max(line counts), in [0,1].

    Changed lines are the lines of the larger file not covered by the common
    subsequence, so a replaced line counts once and pure insertions or
    deletions count their own lines. Arguments are put in a canonical order
    first, so the measure is exactly symmetric.
    """
    a = parent_code.splitlines()
    b = child_code.splitlines()
    if not a and not b:
        return 0.0
    if b < a:
        a, b = b, a
    matcher = difflib.SequenceMatcher(a=a, b=b, autojunk=False)
    matched = sum(block.size for block in matcher.get_matching_blocks())
    longest = max(len(a), len(b))
    return (longest - matched) / longest


_CAMEL = re.compile(r"[A-Z]+(?![a-z])|[A-Z][a-z0-9]*|[a-z0-9]+")


def split_name(name: str) -> list[str]:
    """Camel-case split; all-caps runs stay whole (abbreviations are words)."""
    return [tok for part in re.split(r"[\W_]+", name) for tok in _CAMEL.findall(part)]


def name_tokens(names: list[str]) -> Counter:
    """Case-insensitive token frequencies over a list of algorithm names.

    Keys keep their all-caps spelling when a token only ever appears as an
    abbreviation, and are lowercased otherwise.
    """
    counts: Counter = Counter()
    forms: dict[str, set[str]] = {}
    for name in names:
        for tok in split_name(name):
            key = tok.lower()
            counts[key] += 1
            forms.setdefault(key, set()).add(tok)
    out: Counter = Counter()
    for key, n in counts.items():
        seen = forms[key]
        if all(f.isupper() and len(f) > 1 for f in seen):
            out[next(iter(seen))] = n
        else:
            out[key] = n
    return out


@dataclass(frozen=True)
class AnalyticsRow:
    iteration: int
    parent_id: str
    child_id: str
    diff_ratio: float
    jaro: float


def session_analytics(records: list[dict]) -> list[AnalyticsRow]:
    """One row per generation step (iteration >= 1) of a persisted session.

    Records are the dict form of the iteration log; the parent of each step
    is looked up by id among earlier candidates.
    """
    by_id = {rec["candidate"]["id"]: rec["candidate"] for rec in records}
    rows = []
    for rec in records:
        parent_id = rec.get("parent_id")
        if rec["iteration"] == 0 or parent_id is None:
            continue
        parent = by_id[parent_id]
        child = rec["candidate"]
        rows.append(
            AnalyticsRow(
                iteration=rec["iteration"],
                parent_id=parent_id,
                child_id=child["id"],
                diff_ratio=diff_ratio(parent["code"], child["code"]),
                jaro=jaro(parent["name"], child["name"]),
            )
        )
    return rows


def write_analytics_csv(rows: list[AnalyticsRow], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "parent_id", "child_id", "diff_ratio", "jaro"])
        for row in rows:
            writer.writerow(
                [row.iteration, row.parent_id, row.child_id,
                 f"{row.diff_ratio:.6f}", f"{row.jaro:.6f}"]
            )
