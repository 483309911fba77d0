"""Sentence and token segmentation for clinical-trial record text.

Eligibility criteria usually arrive one criterion per line, while result
summaries and conclusions are prose paragraphs, so :func:`split_records`
supports both layouts.  The tokenizer keeps clinically meaningful units
atomic: ratios ("140/90"), numeric ranges ("21-45"), hyphenated numeric
qualifiers ("12-lead") and compound units ("kg/m^2") each come out as a
single token.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .units import is_known_unit


class SplitMode(Enum):
    LINES = "lines"
    PARAGRAPHS = "paragraphs"


class TokenShape(Enum):
    WORD = "WORD"
    NUMBER = "NUMBER"
    RATIO = "RATIO"
    RANGE = "RANGE"
    UNIT_LIKE = "UNIT_LIKE"
    PUNCT = "PUNCT"
    SYMBOL = "SYMBOL"


@dataclass(frozen=True)
class Token:
    """One token with half-open character offsets into its sentence."""

    surface: str
    start: int
    end: int
    shape: TokenShape


@dataclass(frozen=True)
class SentenceRecord:
    """A sentence-scoped unit of one record.

    ``char_offset`` locates the sentence inside the original record text, so
    ``record_text[char_offset : char_offset + len(text)] == text``.
    """

    record_id: str
    sentence_index: int
    text: str
    char_offset: int
    tokens: tuple[Token, ...]


# Comparison glyphs come out as SYMBOL tokens.  "≦"/"≧" are treated as
# aliases of "≤"/"≥" downstream; the surface is preserved here.
_GLYPHS = frozenset({"<=", ">=", "≤", "≥", "≦", "≧", "<", ">", "="})

_PUNCT_CHARS = frozenset("()[]{},;:.!?\"'`/\\-–—&")

_SCAN_RE = re.compile(
    r"""
      \d+(?:\.\d+)?/\d+(?:\.\d+)?                      # ratio: 140/90
    | \d+(?:\.\d+)?[-–]\d+(?:\.\d+)?(?![A-Za-z])        # range: 21-45
    | \d+(?:\.\d+)?[-–][A-Za-z][A-Za-z0-9-]*            # numeric qualifier: 12-lead
    | (?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?              # number: 40, 1,000, 2.5
    | [A-Za-z][A-Za-z0-9'’]*(?:[-/^][A-Za-z0-9^]+)*     # word / compound unit: kg/m^2
    | <=|>=|≤|≥|≦|≧|[<>=]
    | \S
    """,
    re.VERBOSE,
)

_RATIO_RE = re.compile(r"\d+(?:\.\d+)?/\d+(?:\.\d+)?")
_RANGE_RE = re.compile(r"\d+(?:\.\d+)?[-–]\d+(?:\.\d+)?")
_NUMBER_RE = re.compile(r"(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?")


def _shape_of(surface: str) -> TokenShape:
    if _RATIO_RE.fullmatch(surface):
        return TokenShape.RATIO
    if _RANGE_RE.fullmatch(surface):
        return TokenShape.RANGE
    if _NUMBER_RE.fullmatch(surface):
        return TokenShape.NUMBER
    if surface in _GLYPHS:
        return TokenShape.SYMBOL
    if surface == "%" or any(c.isalpha() for c in surface):
        return TokenShape.UNIT_LIKE if is_known_unit(surface) else TokenShape.WORD
    if len(surface) == 1 and surface in _PUNCT_CHARS:
        return TokenShape.PUNCT
    return TokenShape.SYMBOL


def tokenize(sentence_text: str) -> list[Token]:
    """Tokenize one sentence, preserving character offsets."""

    tokens = []
    for m in _SCAN_RE.finditer(sentence_text):
        surface = m.group(0)
        tokens.append(Token(surface, m.start(), m.end(), _shape_of(surface)))
    return tokens


# Terminal periods after these tokens never end a sentence.
_ABBREVIATIONS = frozenset(
    {
        "e.g.", "i.e.", "vs.", "etc.", "ca.", "approx.", "resp.",
        "dr.", "mr.", "mrs.", "ms.", "prof.", "st.", "jr.", "sr.",
        "fig.", "figs.", "no.", "nos.", "vol.", "al.",
    }
)

_NEXT_SENTENCE_RE = re.compile(r"\s+([A-Z0-9])")
_SINGLE_INITIAL_RE = re.compile(r"[A-Z]\.")


def _preceding_token(text: str, end: int) -> str:
    start = max(text.rfind(c, 0, end) for c in (" ", "\n", "\t", "\r")) + 1
    return text[start:end]


def _paragraph_spans(text: str) -> list[tuple[int, int]]:
    spans = []
    start = 0
    for m in re.finditer(r"[.?!]", text):
        end = m.end()
        nxt = _NEXT_SENTENCE_RE.match(text, end)
        if not nxt:
            continue
        token = _preceding_token(text, end)
        lowered = token.lower()
        if lowered in _ABBREVIATIONS or lowered.strip("()") in _ABBREVIATIONS:
            continue
        if _SINGLE_INITIAL_RE.fullmatch(token.strip("()")):
            continue
        # A period inside an unclosed parenthesis stays within the sentence.
        if text.count("(", start, end) > text.count(")", start, end):
            continue
        spans.append((start, end))
        start = nxt.start(1)
    if text[start:].strip():
        spans.append((start, len(text)))
    return spans


def _line_spans(text: str) -> list[tuple[int, int]]:
    spans = []
    pos = 0
    for line in text.split("\n"):
        if line.strip():
            spans.append((pos, pos + len(line)))
        pos += len(line) + 1
    return spans


def _trim(text: str, start: int, end: int) -> tuple[int, int]:
    while start < end and text[start].isspace():
        start += 1
    while end > start and text[end - 1].isspace():
        end -= 1
    return start, end


def split_records(raw: str, mode: SplitMode, record_id: str = "") -> list[SentenceRecord]:
    """Split raw record text into tokenized sentence units.

    ``LINES`` emits one unit per non-empty line; ``PARAGRAPHS`` splits at
    terminal punctuation followed by whitespace and a capital letter or
    digit, guarded by an abbreviation stop list.
    """

    if not raw:
        return []
    spans = _line_spans(raw) if mode is SplitMode.LINES else _paragraph_spans(raw)
    sentences = []
    for start, end in spans:
        start, end = _trim(raw, start, end)
        if start >= end:
            continue
        text = raw[start:end]
        sentences.append(
            SentenceRecord(
                record_id=record_id,
                sentence_index=len(sentences),
                text=text,
                char_offset=start,
                tokens=tuple(tokenize(text)),
            )
        )
    return sentences
