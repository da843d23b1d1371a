"""Analytics: Jaro anchors, diff-ratio oracle cases, name tokenization."""

from __future__ import annotations

import csv
import random
import string

import pytest

from llmopt import analysis as an


def test_jaro_identity_and_disjoint():
    for s in ("a", "DE", "AdaptiveSwarm", "x" * 40):
        assert an.jaro(s, s) == 1.0
    assert an.jaro("abc", "xyz") == 0.0
    assert an.jaro("", "abc") == 0.0
    assert an.jaro("", "") == 0.0


def test_jaro_classic_anchors():
    assert an.jaro("MARTHA", "MARHTA") == pytest.approx(0.9444, abs=1e-4)
    assert an.jaro("CRATE", "TRACE") == pytest.approx(0.7333, abs=1e-4)
    assert an.jaro("DWAYNE", "DUANE") == pytest.approx(0.8222, abs=1e-4)


def test_jaro_symmetric_on_random_pairs():
    rng = random.Random(2024)
    alphabet = string.ascii_uppercase[:6]
    for _ in range(300):
        s = "".join(rng.choices(alphabet, k=rng.randint(0, 12)))
        t = "".join(rng.choices(alphabet, k=rng.randint(0, 12)))
        left, right = an.jaro(s, t), an.jaro(t, s)
        assert left == pytest.approx(right, abs=1e-12)
        assert 0.0 <= left <= 1.0


def test_diff_ratio_identity_and_disjoint():
    code = "a = 1\nb = 2\n"
    assert an.diff_ratio(code, code) == 0.0
    assert an.diff_ratio("", "") == 0.0
    assert an.diff_ratio("a\nb\nc", "x\ny\nz") == 1.0


def test_diff_ratio_single_replaced_line():
    parent = "l1\nl2\nl3\nl4"
    child = "l1\nl2 changed\nl3\nl4"
    assert an.diff_ratio(parent, child) == 0.25


def test_diff_ratio_insertion_counts_against_longer_file():
    parent = "l1\nl2\nl3"
    child = "l1\nl2\nnew\nl3"
    assert an.diff_ratio(parent, child) == pytest.approx(0.25)


def test_diff_ratio_symmetric():
    rng = random.Random(7)
    pool = [f"line {i}" for i in range(12)]
    for _ in range(200):
        a = "\n".join(rng.choices(pool, k=rng.randint(0, 10)))
        b = "\n".join(rng.choices(pool, k=rng.randint(0, 10)))
        assert an.diff_ratio(a, b) == an.diff_ratio(b, a)
        assert 0.0 <= an.diff_ratio(a, b) <= 1.0


def test_split_name_camel_and_abbreviations():
    assert an.split_name("AdaptiveHybridDE") == ["Adaptive", "Hybrid", "DE"]
    assert an.split_name("ERADS") == ["ERADS"]
    assert an.split_name("ERADS_QuantumFluxUltraRefined") == [
        "ERADS", "Quantum", "Flux", "Ultra", "Refined",
    ]
    assert an.split_name("QPSO2Hybrid") == ["QPSO", "2", "Hybrid"]


def test_name_tokens_counts():
    got = an.name_tokens(["AdaptiveHybridDE"])
    assert got == {"adaptive": 1, "hybrid": 1, "DE": 1}
    assert an.name_tokens(["ERADS"]) == {"ERADS": 1}
    assert an.name_tokens(["FooBar", "FooBaz"])["foo"] == 2
    # a token seen both as an abbreviation and as a word lowercases
    got = an.name_tokens(["DeepDE", "DeSwarm"])
    assert got["de"] == 2


def test_session_analytics_and_csv(tmp_path):
    records = [
        {"iteration": 0, "parent_id": None,
         "candidate": {"id": "c0", "name": "RandomSearch", "code": "a\nb"}},
        {"iteration": 1, "parent_id": "c0",
         "candidate": {"id": "c1", "name": "RandomSearchPlus", "code": "a\nb\nc"}},
        {"iteration": 2, "parent_id": "c1",
         "candidate": {"id": "c2", "name": "GreedySearchPlus", "code": "a\nz\nc"}},
    ]
    rows = an.session_analytics(records)
    assert [r.iteration for r in rows] == [1, 2]
    assert rows[0].parent_id == "c0" and rows[0].child_id == "c1"
    assert rows[0].diff_ratio == pytest.approx(1 / 3)
    assert rows[1].diff_ratio == pytest.approx(1 / 3)
    assert rows[0].jaro == pytest.approx(an.jaro("RandomSearch", "RandomSearchPlus"))

    out = tmp_path / "analytics.csv"
    an.write_analytics_csv(rows, out)
    with open(out, newline="") as fh:
        got = list(csv.reader(fh))
    assert got[0] == ["iteration", "parent_id", "child_id", "diff_ratio", "jaro"]
    assert len(got) == 3
    assert got[1][0] == "1"
