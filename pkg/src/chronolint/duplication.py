"""Token-window duplication detection across the files of one snapshot.

Streams are normalized first (string/number literals collapse to placeholders,
identifiers stay verbatim), then every window of `window` consecutive tokens
is hashed with a polynomial rolling hash. Hash buckets are only candidates:
matches are confirmed by comparing the actual token windows, so a reported
duplicate is never hash-only. Confirmed windows mark their tokens (and hence
lines) as duplicated; runs of windows shared by the same occurrence set are
chained into maximal blocks.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import lexer
from .analyzer import Issue
from .lexer import Token
from .rulepack import Rulepack

_STRING_MARK = "\x00str"
_NUMBER_MARK = "\x00num"

_HASH_BASE = 1_000_003
_HASH_MOD = (1 << 61) - 1


@dataclass(frozen=True)
class Occurrence:
    file: str
    start_line: int
    end_line: int


@dataclass(frozen=True)
class DupBlock:
    occurrences: tuple[Occurrence, ...]
    window_tokens: int  # length of the duplicated run, >= detection window


@dataclass(frozen=True)
class DuplicationResult:
    blocks: tuple[DupBlock, ...]
    duplicated_lines: dict[str, frozenset[int]]

    def duplicated_line_count(self) -> int:
        return sum(len(lines) for lines in self.duplicated_lines.values())


def normalized_stream(tokens: tuple[Token, ...] | list[Token]) -> list[tuple[str, int]]:
    """(normalized text, line) pairs; comments dropped, literals collapsed."""
    out: list[tuple[str, int]] = []
    for tok in tokens:
        if tok.kind == lexer.COMMENT:
            continue
        if tok.kind == lexer.STRING:
            out.append((_STRING_MARK, tok.line))
        elif tok.kind == lexer.NUMBER:
            out.append((_NUMBER_MARK, tok.line))
        else:
            out.append((tok.text, tok.line))
    return out


def detect_duplicates(
    streams: dict[str, list[tuple[str, int]]], window: int
) -> DuplicationResult:
    """Find all token windows of length *window* occurring at least twice.

    A line is duplicated when any of its tokens lies inside a confirmed
    occurrence. Blocks report maximal runs whose whole occurrence set moves
    in lockstep; degenerate self-overlapping (periodic) repeats still mark
    lines but are not reported as blocks, because their merged occurrences
    would no longer carry identical token sequences.
    """
    if window < 2:
        raise ValueError("duplication window must be >= 2")

    intern: dict[str, int] = {}

    def intern_id(text: str) -> int:
        return intern.setdefault(text, len(intern))

    ids: dict[str, list[int]] = {
        path: [intern_id(text) for text, _ in stream] for path, stream in sorted(streams.items())
    }

    # Candidate buckets by rolling hash, then confirm by comparing windows.
    buckets: dict[int, list[tuple[str, int]]] = {}
    top_power = pow(_HASH_BASE, window - 1, _HASH_MOD)
    for path in sorted(ids):
        seq = ids[path]
        if len(seq) < window:
            continue
        h = 0
        for value in seq[:window]:
            h = (h * _HASH_BASE + value) % _HASH_MOD
        buckets.setdefault(h, []).append((path, 0))
        for start in range(1, len(seq) - window + 1):
            h = ((h - seq[start - 1] * top_power) * _HASH_BASE + seq[start + window - 1]) % _HASH_MOD
            buckets.setdefault(h, []).append((path, start))

    groups: dict[tuple[int, ...], list[tuple[str, int]]] = {}
    for candidates in buckets.values():
        if len(candidates) < 2:
            continue
        confirmed: dict[tuple[int, ...], list[tuple[str, int]]] = {}
        for path, start in candidates:
            content = tuple(ids[path][start : start + window])
            confirmed.setdefault(content, []).append((path, start))
        for content, occs in confirmed.items():
            if len(occs) >= 2:
                groups[content] = sorted(occs)

    marked: dict[str, set[int]] = {path: set() for path in streams}
    for content, occs in groups.items():
        for path, start in occs:
            marked[path].update(range(start, start + window))

    duplicated_lines = {
        path: frozenset(streams[path][i][1] for i in marked[path]) for path in streams
    }

    blocks = _chain_blocks(groups, streams, window)
    return DuplicationResult(blocks=tuple(blocks), duplicated_lines=duplicated_lines)


def duplication_issues(blocks: tuple[DupBlock, ...], rulepack: Rulepack) -> list[Issue]:
    """R-SMELL-004: one issue at every occurrence after the first of each block."""
    if not rulepack.is_enabled("R-SMELL-004"):
        return []
    rule = rulepack.rule("R-SMELL-004")
    issues = []
    for block in blocks:
        first = block.occurrences[0]
        for occ in block.occurrences[1:]:
            issues.append(
                Issue(
                    "R-SMELL-004", rule.category, rule.severity, occ.file, occ.start_line,
                    f"Duplicated block of {block.window_tokens} tokens, "
                    f"first seen at {first.file}:{first.start_line}",
                )
            )
    return issues


def _chain_blocks(
    groups: dict[tuple[int, ...], list[tuple[str, int]]],
    streams: dict[str, list[tuple[str, int]]],
    window: int,
) -> list[DupBlock]:
    # Occurrence set -> content for lockstep chaining.
    occs_by_key: dict[frozenset[tuple[str, int]], tuple[int, ...]] = {
        frozenset(occs): content for content, occs in groups.items()
    }

    def shifted(occset: frozenset[tuple[str, int]], by: int) -> frozenset[tuple[str, int]]:
        return frozenset((path, start + by) for path, start in occset)

    blocks: list[DupBlock] = []
    for occset in occs_by_key:
        if shifted(occset, -1) in occs_by_key:
            continue  # not a chain start
        length = 1
        while shifted(occset, length) in occs_by_key:
            length += 1
        run_tokens = window + length - 1
        spans = sorted(
            (path, start, start + run_tokens - 1) for path, start in occset
        )
        if _self_overlapping(spans):
            continue  # periodic repeat: occurrences are not disjoint equal blocks
        occurrences = tuple(
            Occurrence(
                file=path,
                start_line=streams[path][start][1],
                end_line=streams[path][end][1],
            )
            for path, start, end in spans
        )
        blocks.append(DupBlock(occurrences=occurrences, window_tokens=run_tokens))

    blocks.sort(key=lambda b: (b.occurrences[0].file, b.occurrences[0].start_line, -b.window_tokens))
    return blocks


def _self_overlapping(spans: list[tuple[str, int, int]]) -> bool:
    by_file: dict[str, list[tuple[int, int]]] = {}
    for path, start, end in spans:
        by_file.setdefault(path, []).append((start, end))
    for ranges in by_file.values():
        ranges.sort()
        for (s1, e1), (s2, _) in zip(ranges, ranges[1:]):
            if s2 <= e1:
                return True
    return False
