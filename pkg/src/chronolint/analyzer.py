"""Per-file analysis: line classification, complexity, and rule matching.

Everything here is a pure function of (file bytes, profile, rulepack), which
is what makes historical runs comparable: same inputs, same outputs, on any
platform. Bump ANALYZER_VERSION whenever the semantics of any function in
this module (or the lexer) change, so old fingerprints stop matching.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import lexer
from .lexer import Token, count_physical_lines, decode_source, tokenize
from .profiles import LanguageProfile, ProfileRegistry
from .rulepack import Rulepack

ANALYZER_VERSION = "1.0.0"


@dataclass(frozen=True)
class FileMetrics:
    path: str
    ncloc: int
    comment_lines: int
    blank_lines: int
    complexity: int
    profile_id: str

    @property
    def total_lines(self) -> int:
        return self.ncloc + self.comment_lines + self.blank_lines


@dataclass(frozen=True)
class Issue:
    rule_id: str
    category: str
    severity: str
    file: str
    line: int
    message: str

    def sort_key(self) -> tuple:
        return (self.file, self.line, self.rule_id)


@dataclass(frozen=True)
class FileAnalysis:
    metrics: FileMetrics
    issues: tuple[Issue, ...]
    tokens: tuple[Token, ...]


def classify_lines(tokens: list[Token], total_lines: int) -> tuple[int, int, int]:
    """Classify each physical line exactly once: code beats comment beats blank."""
    code_lines: set[int] = set()
    comment_lines: set[int] = set()
    for tok in tokens:
        if tok.kind == lexer.COMMENT:
            comment_lines.add(tok.line)
        else:
            code_lines.add(tok.line)
    comment_lines -= code_lines
    ncloc = len(code_lines)
    comments = len(comment_lines)
    return ncloc, comments, total_lines - ncloc - comments


def file_complexity(tokens: list[Token], profile: LanguageProfile) -> int:
    """Decision-point count plus one, or zero for files without code."""
    has_code = any(t.kind != lexer.COMMENT for t in tokens)
    if not has_code:
        return 0
    decisions = sum(
        1
        for t in tokens
        if t.kind not in (lexer.COMMENT, lexer.STRING) and t.text in profile.decision_tokens
    )
    return decisions + 1


def apply_rules(
    tokens: list[Token],
    metrics: FileMetrics,
    profile: LanguageProfile,
    rulepack: Rulepack,
) -> list[Issue]:
    """Evaluate the built-in rules against one file's token stream.

    The generic fallback profile carries no rules: its files only contribute
    line counts.
    """
    if profile.is_generic:
        return []

    issues: list[Issue] = []
    code = [t for t in tokens if t.kind != lexer.COMMENT]

    def enabled(rule_id: str) -> bool:
        return rulepack.is_enabled(rule_id)

    if enabled("R-BUG-001"):
        rule = rulepack.rule("R-BUG-001")
        for line in _empty_handler_lines(code):
            issues.append(
                Issue("R-BUG-001", rule.category, rule.severity, metrics.path, line,
                      "Empty exception handler swallows errors")
            )

    if enabled("R-VULN-001"):
        rule = rulepack.rule("R-VULN-001")
        for i, tok in enumerate(code[:-2]):
            if tok.kind != lexer.IDENTIFIER:
                continue
            lowered = tok.text.lower()
            if not any(pat in lowered for pat in profile.secret_identifier_patterns):
                continue
            if code[i + 1].text in ("=", ":=") and code[i + 2].kind == lexer.STRING:
                issues.append(
                    Issue("R-VULN-001", rule.category, rule.severity, metrics.path, tok.line,
                          f"Secret-looking identifier '{tok.text}' assigned a string literal")
                )

    if enabled("R-VULN-002"):
        rule = rulepack.rule("R-VULN-002")
        for i, tok in enumerate(code[:-1]):
            if (
                tok.kind == lexer.IDENTIFIER
                and tok.text in profile.dangerous_calls
                and code[i + 1].text == "("
            ):
                issues.append(
                    Issue("R-VULN-002", rule.category, rule.severity, metrics.path, tok.line,
                          f"Call to dangerous function '{tok.text}'")
                )

    if enabled("R-SMELL-001"):
        rule = rulepack.rule("R-SMELL-001")
        markers = rule.param("markers")
        pattern = re.compile(
            r"\b(" + "|".join(re.escape(m) for m in markers) + r")\b", re.IGNORECASE
        )
        for tok in tokens:
            if tok.kind == lexer.COMMENT:
                match = pattern.search(tok.text)
                if match:
                    issues.append(
                        Issue("R-SMELL-001", rule.category, rule.severity, metrics.path, tok.line,
                              f"Comment contains work marker '{match.group(1).upper()}'")
                    )

    if enabled("R-SMELL-002"):
        rule = rulepack.rule("R-SMELL-002")
        threshold = rule.param("max_complexity")
        if metrics.complexity > threshold:
            issues.append(
                Issue("R-SMELL-002", rule.category, rule.severity, metrics.path, 1,
                      f"File complexity {metrics.complexity} exceeds threshold {threshold}")
            )

    if enabled("R-SMELL-003"):
        rule = rulepack.rule("R-SMELL-003")
        threshold = rule.param("max_ncloc")
        if metrics.ncloc > threshold:
            issues.append(
                Issue("R-SMELL-003", rule.category, rule.severity, metrics.path, 1,
                      f"File has {metrics.ncloc} lines of code, more than {threshold}")
            )

    issues.sort(key=Issue.sort_key)
    return issues


def analyze_file(
    path: str,
    data: bytes,
    registry: ProfileRegistry,
    rulepack: Rulepack,
) -> FileAnalysis:
    """Full single-file pipeline: decode, tokenize, classify, match rules."""
    profile = registry.for_path(path)
    text, clean = decode_source(data)
    if not clean:
        profile = registry.generic
    tokens = tokenize(text, path, profile)
    total = count_physical_lines(text)
    ncloc, comments, blanks = classify_lines(tokens, total)
    metrics = FileMetrics(
        path=path,
        ncloc=ncloc,
        comment_lines=comments,
        blank_lines=blanks,
        complexity=file_complexity(tokens, profile),
        profile_id=profile.profile_id,
    )
    issues = apply_rules(tokens, metrics, profile, rulepack)
    return FileAnalysis(metrics=metrics, issues=tuple(issues), tokens=tuple(tokens))


def _empty_handler_lines(code: list[Token]) -> list[int]:
    """Lines of `catch (...) {}` blocks and `except ...: pass` handlers."""
    lines: list[int] = []
    n = len(code)
    for i, tok in enumerate(code):
        if tok.text == "catch":
            j = i + 1
            if j < n and code[j].text == "(":
                depth = 1
                j += 1
                while j < n and depth:
                    if code[j].text == "(":
                        depth += 1
                    elif code[j].text == ")":
                        depth -= 1
                    j += 1
            if j + 1 < n and code[j].text == "{" and code[j + 1].text == "}":
                lines.append(tok.line)
        elif tok.text == "except":
            j = i + 1
            while j < n and code[j].text != ":":
                j += 1
            if j + 1 < n and code[j + 1].text == "pass":
                lines.append(tok.line)
    return lines
