"""Language profiles: the data tables that drive tokenization and rules.

A profile describes comment/string syntax, which tokens count as decision
points, which call names are considered dangerous, and which identifier
substrings look like secrets. Three are shipped: ``c-like`` (punctuated
syntax: C/C++/Java/Go/Rust/JS/...), ``script-like`` (hash comments), and a
``generic`` fallback that only counts lines. Profiles are part of the
ruleset fingerprint, so edits here change run comparability on purpose.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import RulepackError

SECRET_PATTERNS = [
    "api_key",
    "apikey",
    "passwd",
    "password",
    "private_key",
    "secret",
    "token",
]

# Table form: plain data so it can be serialized into the fingerprint and
# overridden from a JSON file without touching code.
DEFAULT_PROFILE_TABLE: list[dict] = [
    {
        "profile_id": "c-like",
        "extensions": [
            ".c", ".h", ".cc", ".hh", ".cpp", ".hpp", ".cxx", ".hxx",
            ".java", ".js", ".jsx", ".ts", ".tsx", ".mjs", ".cjs",
            ".go", ".rs", ".cs", ".kt", ".kts", ".swift", ".scala",
            ".m", ".mm", ".php", ".dart", ".groovy",
        ],
        "line_comment_prefixes": ["//"],
        "block_comment_delims": [["/*", "*/"]],
        "string_delims": [
            {"quote": "\"", "escape": "\\"},
            {"quote": "'", "escape": "\\"},
            {"quote": "`", "escape": "\\"},
        ],
        "decision_tokens": ["if", "for", "while", "case", "catch", "&&", "||", "?"],
        "dangerous_calls": ["gets", "strcpy", "strcat", "sprintf", "system", "popen", "exec", "eval"],
        "secret_identifier_patterns": SECRET_PATTERNS,
    },
    {
        "profile_id": "script-like",
        "extensions": [".py", ".pyw", ".rb", ".sh", ".bash", ".zsh", ".pl", ".pm", ".r", ".jl"],
        "line_comment_prefixes": ["#"],
        "block_comment_delims": [],
        "string_delims": [
            {"quote": "\"\"\"", "escape": "\\"},
            {"quote": "'''", "escape": "\\"},
            {"quote": "\"", "escape": "\\"},
            {"quote": "'", "escape": "\\"},
        ],
        "decision_tokens": [
            "if", "elif", "for", "while", "case", "when", "except", "rescue",
            "and", "or", "&&", "||",
        ],
        "dangerous_calls": ["eval", "exec", "system", "popen"],
        "secret_identifier_patterns": SECRET_PATTERNS,
    },
    {
        "profile_id": "generic",
        "extensions": [],
        "line_comment_prefixes": [],
        "block_comment_delims": [],
        "string_delims": [],
        "decision_tokens": [],
        "dangerous_calls": [],
        "secret_identifier_patterns": [],
    },
]

GENERIC_PROFILE_ID = "generic"


@dataclass(frozen=True)
class LanguageProfile:
    profile_id: str
    extensions: frozenset[str]
    line_comment_prefixes: tuple[str, ...]
    block_comment_delims: tuple[tuple[str, str], ...]
    string_delims: tuple[tuple[str, str], ...]  # (quote, escape)
    decision_tokens: frozenset[str]
    dangerous_calls: frozenset[str]
    secret_identifier_patterns: tuple[str, ...]

    @property
    def is_generic(self) -> bool:
        return self.profile_id == GENERIC_PROFILE_ID


class ProfileRegistry:
    """Validated set of profiles plus extension-based lookup."""

    def __init__(self, table: list[dict] | None = None):
        self.table = table if table is not None else DEFAULT_PROFILE_TABLE
        self._by_id: dict[str, LanguageProfile] = {}
        self._by_ext: dict[str, LanguageProfile] = {}
        seen_ext: dict[str, str] = {}
        for entry in self.table:
            profile = _profile_from_entry(entry)
            if profile.profile_id in self._by_id:
                raise RulepackError(f"duplicate profile_id {profile.profile_id!r}")
            if not profile.is_generic and not profile.decision_tokens:
                raise RulepackError(
                    f"profile {profile.profile_id!r} needs at least one decision token"
                )
            for ext in profile.extensions:
                if ext in seen_ext:
                    raise RulepackError(
                        f"extension {ext!r} claimed by both {seen_ext[ext]!r} "
                        f"and {profile.profile_id!r}"
                    )
                seen_ext[ext] = profile.profile_id
                self._by_ext[ext] = profile
            self._by_id[profile.profile_id] = profile
        if GENERIC_PROFILE_ID not in self._by_id:
            raise RulepackError("profile table must include the generic fallback")

    @property
    def generic(self) -> LanguageProfile:
        return self._by_id[GENERIC_PROFILE_ID]

    def get(self, profile_id: str) -> LanguageProfile:
        return self._by_id[profile_id]

    def for_path(self, path: str) -> LanguageProfile:
        name = path.rsplit("/", 1)[-1]
        dot = name.rfind(".")
        if dot <= 0:
            return self.generic
        return self._by_ext.get(name[dot:].lower(), self.generic)

    def canonical_table(self) -> list[dict]:
        """Fingerprint material: the table with deterministically ordered members."""
        out = []
        for entry in sorted(self.table, key=lambda e: e["profile_id"]):
            out.append(
                {
                    "profile_id": entry["profile_id"],
                    "extensions": sorted(entry["extensions"]),
                    "line_comment_prefixes": list(entry["line_comment_prefixes"]),
                    "block_comment_delims": [list(p) for p in entry["block_comment_delims"]],
                    "string_delims": [
                        {"quote": d["quote"], "escape": d["escape"]}
                        for d in entry["string_delims"]
                    ],
                    "decision_tokens": sorted(entry["decision_tokens"]),
                    "dangerous_calls": sorted(entry["dangerous_calls"]),
                    "secret_identifier_patterns": sorted(entry["secret_identifier_patterns"]),
                }
            )
        return out


def _profile_from_entry(entry: dict) -> LanguageProfile:
    try:
        return LanguageProfile(
            profile_id=entry["profile_id"],
            extensions=frozenset(e.lower() for e in entry["extensions"]),
            line_comment_prefixes=tuple(entry["line_comment_prefixes"]),
            block_comment_delims=tuple((o, c) for o, c in entry["block_comment_delims"]),
            string_delims=tuple((d["quote"], d["escape"]) for d in entry["string_delims"]),
            decision_tokens=frozenset(entry["decision_tokens"]),
            dangerous_calls=frozenset(entry["dangerous_calls"]),
            secret_identifier_patterns=tuple(
                p.lower() for p in entry["secret_identifier_patterns"]
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise RulepackError(f"malformed profile entry: {exc}") from exc


def default_registry() -> ProfileRegistry:
    return ProfileRegistry(DEFAULT_PROFILE_TABLE)


def load_profiles(path) -> ProfileRegistry:
    """Load a profile table from a JSON file (same shape as the built-in table)."""
    import json
    from pathlib import Path

    try:
        table = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise RulepackError(f"cannot read profile table {path}: {exc}") from exc
    if not isinstance(table, list):
        raise RulepackError("profile table root must be a list")
    return ProfileRegistry(table)
