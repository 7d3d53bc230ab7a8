from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chronolint.duplication import (
    detect_duplicates,
    duplication_issues,
    normalized_stream,
)
from chronolint.lexer import tokenize
from chronolint.profiles import default_registry
from chronolint.rulepack import default_rulepack, rulepack_from_data
from dup_oracle import brute_force_duplicated_lines, random_streams

REG = default_registry()
SCRIPT = REG.get("script-like")
PACK = default_rulepack()


def stream_of(text: str, path: str = "f.py"):
    return normalized_stream(tokenize(text, path, SCRIPT))


def make_tokens(symbols: list[str], lines_per: int = 5):
    """Stream with `lines_per` tokens per line."""
    return [(s, 1 + i // lines_per) for i, s in enumerate(symbols)]


def test_identical_files_fully_duplicated():
    # two byte-identical files, 60 tokens / 40 lines-ish each, k=50
    body = "\n".join(f"x{i} = {i}" for i in range(20)) + "\n"  # 3 tokens per line: 60
    streams = {"a.py": stream_of(body), "b.py": stream_of(body)}
    assert len(streams["a.py"]) == 60
    result = detect_duplicates(streams, 50)
    for path in streams:
        assert result.duplicated_lines[path] == frozenset(range(1, 21))


def test_short_unique_file_no_duplicates():
    body = "\n".join(f"y{i} = {i}" for i in range(10)) + "\n"  # 30 tokens < 50
    result = detect_duplicates({"a.py": stream_of(body)}, 50)
    assert result.duplicated_lines["a.py"] == frozenset()
    assert result.blocks == ()


def test_block_pasted_twice_in_one_file():
    # one 60-token block pasted twice in one file, k=50
    block = [f"s{i}" for i in range(60)]
    separator = [f"u{i}" for i in range(70)]  # unique spacer
    symbols = block + separator + block
    streams = {"a.py": make_tokens(symbols, lines_per=5)}
    result = detect_duplicates(streams, 50)

    oracle = brute_force_duplicated_lines(streams, 50)
    assert set(result.duplicated_lines["a.py"]) == oracle["a.py"]

    assert len(result.blocks) == 1
    block_found = result.blocks[0]
    assert len(block_found.occurrences) == 2
    assert block_found.window_tokens == 60
    first, second = block_found.occurrences
    assert (first.start_line, first.end_line) == (1, 12)
    assert (second.start_line, second.end_line) == (27, 38)


def test_occurrences_sorted_and_content_equal():
    body = "\n".join(f"z{i} = {i}" for i in range(20)) + "\n"
    streams = {"b.py": stream_of(body), "a.py": stream_of(body)}
    result = detect_duplicates(streams, 50)
    assert len(result.blocks) == 1
    occs = result.blocks[0].occurrences
    assert [o.file for o in occs] == ["a.py", "b.py"]


def test_duplication_issue_on_second_occurrence_only():
    body = "\n".join(f"w{i} = {i}" for i in range(20)) + "\n"
    streams = {"a.py": stream_of(body), "b.py": stream_of(body)}
    result = detect_duplicates(streams, 50)
    issues = duplication_issues(result.blocks, PACK)
    assert len(issues) == 1
    assert issues[0].rule_id == "R-SMELL-004"
    assert issues[0].file == "b.py"
    assert issues[0].category == "MAINTAINABILITY"


def test_disabled_rule_emits_no_issues():
    body = "\n".join(f"w{i} = {i}" for i in range(20)) + "\n"
    streams = {"a.py": stream_of(body), "b.py": stream_of(body)}
    result = detect_duplicates(streams, 50)
    pack = rulepack_from_data({"rules": [{"rule_id": "R-SMELL-004", "enabled": False}]})
    assert duplication_issues(result.blocks, pack) == []


def test_literal_normalization_matches_renamed_constants():
    a = "\n".join(f"k{i} = {i}" for i in range(20)) + "\n"
    b = "\n".join(f"k{i} = {i + 100}" for i in range(20)) + "\n"  # numbers differ
    result = detect_duplicates({"a.py": stream_of(a), "b.py": stream_of(b)}, 50)
    assert result.duplicated_lines["a.py"] == frozenset(range(1, 21))
    assert result.duplicated_lines["b.py"] == frozenset(range(1, 21))


def test_identifiers_not_normalized():
    a = "\n".join(f"k{i} = {i}" for i in range(20)) + "\n"
    b = "\n".join(f"m{i} = {i}" for i in range(20)) + "\n"  # identifiers differ
    result = detect_duplicates({"a.py": stream_of(a), "b.py": stream_of(b)}, 50)
    assert result.duplicated_lines["a.py"] == frozenset()
    assert result.duplicated_lines["b.py"] == frozenset()


def test_window_below_two_rejected():
    with pytest.raises(ValueError):
        detect_duplicates({}, 1)


def test_periodic_content_marks_lines_without_blocks():
    streams = {"a.py": make_tokens(["p"] * 120, lines_per=4)}
    result = detect_duplicates(streams, 50)
    oracle = brute_force_duplicated_lines(streams, 50)
    assert set(result.duplicated_lines["a.py"]) == oracle["a.py"]
    for block in result.blocks:
        # any reported block must have verified-equal, non-overlapping occurrences
        assert len(block.occurrences) >= 2


def test_permutation_stability():
    a = "\n".join(f"q{i} = {i}" for i in range(20)) + "\n"
    b = "\n".join(f"q{i} = {i}" for i in range(20)) + "\n"
    c = "unrelated = 1\n"
    s1 = {"a.py": stream_of(a), "b.py": stream_of(b), "c.py": stream_of(c)}
    s2 = dict(reversed(list(s1.items())))
    r1 = detect_duplicates(s1, 50)
    r2 = detect_duplicates(s2, 50)
    assert r1.duplicated_lines == r2.duplicated_lines
    assert r1.blocks == r2.blocks


@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 5, 50]))
@settings(max_examples=40, deadline=None)
def test_oracle_equivalence_random_streams(seed, window):
    rng = random.Random(seed)
    streams = random_streams(rng, max_tokens=160)
    result = detect_duplicates(streams, window)
    oracle = brute_force_duplicated_lines(streams, window)
    assert {p: set(lines) for p, lines in result.duplicated_lines.items()} == oracle


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_density_bounds(seed):
    rng = random.Random(seed)
    streams = random_streams(rng, max_tokens=120)
    result = detect_duplicates(streams, 5)
    for path, stream in streams.items():
        lines = {line for _, line in stream}
        assert result.duplicated_lines[path] <= lines
