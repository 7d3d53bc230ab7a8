"""Profile-driven tokenizer.

Turns decoded source text into a flat token stream: identifiers, keywords
(words listed as decision tokens), strings, numbers, punctuation and
comments. Block comments and multi-line strings emit one token per physical
line they cover, so line classification can stay a pure function of the
token stream. The generic fallback profile emits one token per non-blank
line and nothing else.
"""

from __future__ import annotations

from dataclasses import dataclass

from .profiles import LanguageProfile

COMMENT = "comment"
IDENTIFIER = "identifier"
KEYWORD = "keyword"
NUMBER = "number"
PUNCT = "punct"
STRING = "string"

# Longest-match-first multi-character operators. "&&" and "||" must stay
# single tokens for decision counting; "??" / "?." must not leak a bare "?".
_MULTI_PUNCT = (
    "<<=", ">>=", "===", "!==", "**=", "...",
    "&&", "||", "==", "!=", "<=", ">=", "->", "=>", "::",
    "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
    "<<", ">>", "**", "//", "??", "?.", ":=",
)

_WS = " \t\f\v"


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    file: str
    line: int


def decode_source(data: bytes) -> tuple[str, bool]:
    """Decode file bytes to text, normalizing newlines.

    Returns (text, clean); clean is False when bytes were not valid UTF-8
    (replacement characters inserted) or contain NULs, in which case the
    caller should degrade to the generic profile.
    """
    try:
        text = data.decode("utf-8")
        clean = True
    except UnicodeDecodeError:
        text = data.decode("utf-8", errors="replace")
        clean = False
    if "\x00" in text:
        clean = False
    return text.replace("\r\n", "\n").replace("\r", "\n"), clean


def count_physical_lines(text: str) -> int:
    if not text:
        return 0
    return text.count("\n") + (0 if text.endswith("\n") else 1)


def tokenize(text: str, path: str, profile: LanguageProfile) -> list[Token]:
    """Tokenize *text* (already decoded and newline-normalized)."""
    if profile.is_generic:
        return _tokenize_generic(text, path)

    block_opens = sorted(profile.block_comment_delims, key=lambda d: -len(d[0]))
    line_prefixes = sorted(profile.line_comment_prefixes, key=len, reverse=True)
    string_delims = sorted(profile.string_delims, key=lambda d: -len(d[0]))

    tokens: list[Token] = []
    i = 0
    line = 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            i += 1
            continue
        if ch in _WS:
            i += 1
            continue

        matched = False
        for opener, closer in block_opens:
            if text.startswith(opener, i):
                end = text.find(closer, i + len(opener))
                stop = n if end < 0 else end + len(closer)
                line = _emit_spanning(tokens, COMMENT, text[i:stop], path, line)
                i = stop
                matched = True
                break
        if matched:
            continue

        for prefix in line_prefixes:
            if text.startswith(prefix, i):
                eol = text.find("\n", i)
                stop = n if eol < 0 else eol
                tokens.append(Token(COMMENT, text[i:stop], path, line))
                i = stop
                matched = True
                break
        if matched:
            continue

        for quote, escape in string_delims:
            if text.startswith(quote, i):
                j = i + len(quote)
                multiline = len(quote) > 1
                while j < n:
                    if escape and text[j] == escape:
                        j += 2
                        continue
                    if text.startswith(quote, j):
                        j += len(quote)
                        break
                    if text[j] == "\n" and not multiline:
                        break  # unterminated single-line string stops at EOL
                    j += 1
                else:
                    j = n
                j = min(j, n)
                line = _emit_spanning(tokens, STRING, text[i:j], path, line)
                i = j
                matched = True
                break
        if matched:
            continue

        if ch.isalpha() or ch == "_":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = KEYWORD if word in profile.decision_tokens else IDENTIFIER
            tokens.append(Token(kind, word, path, line))
            i = j
            continue

        if ch.isdigit():
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] in "._"):
                j += 1
            tokens.append(Token(NUMBER, text[i:j], path, line))
            i = j
            continue

        for op in _MULTI_PUNCT:
            if text.startswith(op, i):
                tokens.append(Token(PUNCT, op, path, line))
                i += len(op)
                matched = True
                break
        if matched:
            continue

        tokens.append(Token(PUNCT, ch, path, line))
        i += 1

    return tokens


def _emit_spanning(
    tokens: list[Token], kind: str, lexeme: str, path: str, start_line: int
) -> int:
    """Emit one token per physical line covered by *lexeme*.

    Returns the line number at which scanning resumes (the lexeme's last line).
    """
    pieces = lexeme.split("\n")
    if lexeme.endswith("\n"):
        pieces = pieces[:-1]  # lexeme stops exactly at a line boundary
    for offset, piece in enumerate(pieces):
        tokens.append(Token(kind, piece, path, start_line + offset))
    return start_line + lexeme.count("\n")


def _tokenize_generic(text: str, path: str) -> list[Token]:
    tokens = []
    for idx, raw in enumerate(text.split("\n")):
        stripped = raw.strip()
        if stripped:
            tokens.append(Token(IDENTIFIER, stripped, path, idx + 1))
    return tokens
