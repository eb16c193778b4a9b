"""Lexer, parser and matcher compiler for Azure RBAC action patterns.

The pattern language has three tokens (TEXT, WILDCARD, SLASH) and a
single production for segments::

    pattern      : segment_list
    segment_list : segment | segment_list SLASH segment
    segment      : TEXT | WILDCARD | TEXT WILDCARD | WILDCARD TEXT
                 | TEXT WILDCARD TEXT

Parsing lowercases the input and checks the preprocessing rules
(one wildcard at most, no wildcard inside the verb segment, verb
whitelist, no bare ``*``).  Every violation is collected, so a rejected
pattern reports all of its problems at once.
"""

from __future__ import annotations

import enum
import re
import string
from dataclasses import dataclass, field
from typing import Optional

TEXT_CHARS = frozenset(string.ascii_letters + string.digits + "._-{}$")
WHITESPACE = frozenset(" \t\n\r")
VERBS = frozenset({"read", "write", "delete", "action"})

E_MULTI_WILDCARD = "E_MULTI_WILDCARD"
E_WILDCARD_IN_VERB = "E_WILDCARD_IN_VERB"
E_BAD_VERB = "E_BAD_VERB"
E_BARE_WILDCARD = "E_BARE_WILDCARD"
E_TRAILING_SLASH = "E_TRAILING_SLASH"
E_ILLEGAL_CHAR = "E_ILLEGAL_CHAR"
E_EMPTY_SEGMENT = "E_EMPTY_SEGMENT"
# two TEXT tokens separated only by whitespace; no production accepts it
E_SYNTAX = "E_SYNTAX"


class TokenKind(enum.Enum):
    TEXT = "TEXT"
    WILDCARD = "WILDCARD"
    SLASH = "SLASH"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    start: int
    end: int

    def __repr__(self) -> str:
        return f"{self.kind.value}({self.lexeme!r}@{self.start})"


class LexError(ValueError):
    def __init__(self, offset: int, char: str):
        super().__init__(f"illegal character {char!r} at offset {offset}")
        self.offset = offset
        self.char = char


def _scan(text: str) -> tuple[list[Token], list[tuple[int, str]]]:
    tokens: list[Token] = []
    errors: list[tuple[int, str]] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in WHITESPACE:
            i += 1
        elif ch == "*":
            tokens.append(Token(TokenKind.WILDCARD, ch, i, i + 1))
            i += 1
        elif ch == "/":
            tokens.append(Token(TokenKind.SLASH, ch, i, i + 1))
            i += 1
        elif ch in TEXT_CHARS:
            j = i + 1
            while j < n and text[j] in TEXT_CHARS:
                j += 1
            tokens.append(Token(TokenKind.TEXT, text[i:j], i, j))
            i = j
        else:
            errors.append((i, ch))
            i += 1
    return tokens, errors


def lex(text: str) -> list[Token]:
    """Tokenize ``text``; offsets refer to the original string.

    Raises LexError at the first character outside the legal alphabet.
    """
    if not text.strip():
        raise ValueError("empty input")
    tokens, errors = _scan(text)
    if errors:
        raise LexError(*errors[0])
    return tokens


@dataclass(frozen=True)
class Segment:
    """One slash-delimited segment: ``head``, optional ``*``, ``tail``."""

    head: str = ""
    star: bool = False
    tail: str = ""

    @property
    def kind(self) -> str:
        if not self.star:
            return "Text"
        return {
            (False, False): "Star",
            (True, False): "TextStar",
            (False, True): "StarText",
            (True, True): "TextStarText",
        }[(bool(self.head), bool(self.tail))]

    def regex(self) -> str:
        if not self.star:
            return re.escape(self.head)
        return re.escape(self.head) + ".*" + re.escape(self.tail)

    def __str__(self) -> str:
        return self.head + ("*" if self.star else "") + self.tail


@dataclass(frozen=True)
class Matcher:
    """Anchored ``prefix`` + any-run + ``suffix`` matcher.

    With ``wildcard=False`` the matcher is plain equality against ``prefix``.
    """

    prefix: str
    suffix: str = ""
    wildcard: bool = False

    def matches(self, s: str) -> bool:
        if not self.wildcard:
            return s == self.prefix
        return (
            len(s) >= len(self.prefix) + len(self.suffix)
            and s.startswith(self.prefix)
            and s.endswith(self.suffix)
        )

    __call__ = matches


@dataclass(frozen=True)
class WildcardPattern:
    raw: str
    segments: tuple[Segment, ...]
    wildcard_index: Optional[int]
    matcher: Matcher = field(compare=False)

    @property
    def explicit(self) -> bool:
        return self.wildcard_index is None

    @property
    def prefix(self) -> str:
        return self.matcher.prefix

    @property
    def suffix(self) -> str:
        return self.matcher.suffix

    @property
    def regex(self) -> str:
        """Anchored regex assembled segment by segment (used as a cross-check)."""
        return "/".join(seg.regex() for seg in self.segments)

    def matches(self, s: str) -> bool:
        return self.matcher.matches(s)

    def __str__(self) -> str:
        return self.raw


@dataclass(frozen=True)
class Violation:
    rule_id: str
    offset: int
    message: str


@dataclass(frozen=True)
class ParseReport:
    accepted: bool
    pattern: Optional[WildcardPattern]
    violations: tuple[Violation, ...] = ()

    @property
    def rule_ids(self) -> set[str]:
        return {v.rule_id for v in self.violations}


class PatternError(ValueError):
    """Raised by :func:`parse_pattern` when a pattern is rejected."""

    def __init__(self, text: str, report: ParseReport):
        self.text = text
        self.report = report
        first = report.violations[0]
        super().__init__(f"{first.rule_id} at offset {first.offset}: {first.message} in {text!r}")


def compile_matcher(pattern: WildcardPattern) -> Matcher:
    return _matcher_for(pattern.raw, pattern.wildcard_index)


def _matcher_for(raw: str, star: Optional[int]) -> Matcher:
    if star is None:
        return Matcher(raw)
    return Matcher(raw[:star], raw[star + 1:], wildcard=True)


def _check_dots(tok: Token, first_in_seg: bool, last_in_seg: bool) -> Optional[Violation]:
    lexeme = tok.lexeme
    pos = lexeme.find("..")
    if pos >= 0:
        return Violation(E_EMPTY_SEGMENT, tok.start + pos, "doubled dot")
    if first_in_seg and lexeme.startswith("."):
        return Violation(E_EMPTY_SEGMENT, tok.start, "segment starts with a dot")
    if last_in_seg and lexeme.endswith("."):
        return Violation(E_EMPTY_SEGMENT, tok.end - 1, "segment ends with a dot")
    return None


def parse(text: str, *, allow_bare_wildcard: bool = False, check_verb: bool = True) -> ParseReport:
    """Parse and validate an action pattern.

    ``check_verb=False`` skips the read/write/delete/action whitelist; the
    catalog loader uses it so that unknown verbs become warnings instead of
    rejections.
    """
    violations: list[Violation] = []
    tokens, errors = _scan(text)
    for offset, ch in errors:
        violations.append(Violation(E_ILLEGAL_CHAR, offset, f"illegal character {ch!r}"))

    if not tokens:
        if not errors:
            violations.append(Violation(E_BARE_WILDCARD, 0, "input has no segments"))
        return ParseReport(False, None, tuple(violations))

    # split on SLASH
    groups: list[list[Token]] = [[]]
    slashes: list[Token] = []
    for tok in tokens:
        if tok.kind is TokenKind.SLASH:
            slashes.append(tok)
            groups.append([])
        else:
            groups[-1].append(tok)

    for i, group in enumerate(groups):
        if group:
            continue
        if i == len(groups) - 1:
            violations.append(Violation(E_TRAILING_SLASH, slashes[-1].start, "trailing slash"))
        else:
            at = slashes[i].start
            violations.append(Violation(E_EMPTY_SEGMENT, at, "empty segment"))

    stars = [t for t in tokens if t.kind is TokenKind.WILDCARD]
    for extra in stars[1:]:
        violations.append(Violation(E_MULTI_WILDCARD, extra.start, "more than one wildcard"))

    segments: list[Segment] = []
    for group in groups:
        for a, b in zip(group, group[1:]):
            if a.kind is TokenKind.TEXT and b.kind is TokenKind.TEXT:
                violations.append(Violation(E_SYNTAX, b.start, "unexpected text after whitespace"))
        for j, tok in enumerate(group):
            if tok.kind is TokenKind.TEXT:
                bad = _check_dots(tok, j == 0, j == len(group) - 1)
                if bad:
                    violations.append(bad)
        head, star, tail = [], False, []
        for tok in group:
            if tok.kind is TokenKind.WILDCARD:
                star = True
            elif star:
                tail.append(tok.lexeme)
            else:
                head.append(tok.lexeme)
        segments.append(Segment("".join(head).lower(), star, "".join(tail).lower()))

    raw = "".join(t.lexeme for t in tokens).lower()

    if raw == "*" and not allow_bare_wildcard:
        violations.append(Violation(E_BARE_WILDCARD, stars[0].start, "bare wildcard"))

    last_group = groups[-1]
    if last_group:
        last_stars = [t for t in last_group if t.kind is TokenKind.WILDCARD]
        only_star = len(last_group) == 1 and bool(last_stars)
        for tok in last_stars:
            # a trailing first wildcard swallows the verb from an earlier position
            trailing = tok is tokens[-1] and tok is stars[0]
            if not (only_star or trailing):
                violations.append(Violation(E_WILDCARD_IN_VERB, tok.start, "wildcard inside the verb segment"))
        if check_verb and not last_stars:
            verb = "".join(t.lexeme for t in last_group).lower()
            if verb not in VERBS:
                violations.append(
                    Violation(E_BAD_VERB, last_group[0].start, f"verb {verb!r} is not one of {sorted(VERBS)}")
                )

    if violations:
        violations.sort(key=lambda v: (v.offset, v.rule_id))
        return ParseReport(False, None, tuple(violations))

    star_index = raw.find("*")
    wildcard_index = star_index if star_index >= 0 else None
    pattern = WildcardPattern(raw, tuple(segments), wildcard_index, _matcher_for(raw, wildcard_index))
    return ParseReport(True, pattern, ())


def parse_pattern(text: str, **kwargs) -> WildcardPattern:
    """Like :func:`parse` but returns the pattern or raises PatternError."""
    report = parse(text, **kwargs)
    if not report.accepted:
        raise PatternError(text, report)
    return report.pattern


def caret_message(text: str, violation: Violation) -> str:
    return f"{violation.rule_id}: {violation.message}\n  {text}\n  {' ' * violation.offset}^"
