"""Dictionary-based recognition of medical entity mentions.

Mentions are found by scanning token n-grams (up to six tokens) against the
knowledge base, longest match first.  A trailing plural "s" on the final
token is folded before lookup so "antidepressants" hits "antidepressant".
Parenthesized abbreviation definitions ("electrocardiograph (ECG)") create
record-local synonyms: later occurrences of the short form become mentions
of the long form's concept.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .kb import Category, KbEntry, KnowledgeBase
from .segmentation import SentenceRecord, Token, TokenShape

MAX_NGRAM = 6

_MATCHABLE = (TokenShape.WORD, TokenShape.UNIT_LIKE)
_NUMERIC = (TokenShape.NUMBER, TokenShape.RATIO, TokenShape.RANGE)


@dataclass(frozen=True)
class EntityMention:
    """A recognized concept span, with sentence-local character offsets."""

    sentence_index: int
    start: int
    end: int
    surface: str
    concept_id: str
    matched_term: str


def _fold_plural(word: str) -> str | None:
    if len(word) > 3 and word.endswith("s") and not word.endswith("ss"):
        return word[:-1]
    return None


def _lookup_window(
    window: Sequence[Token], kb: KnowledgeBase
) -> tuple[tuple[KbEntry, str], ...]:
    key = " ".join(t.surface for t in window)
    hits = kb.lookup_terms(key)
    if hits:
        return hits
    folded = _fold_plural(window[-1].surface)
    if folded is not None:
        parts = [t.surface for t in window[:-1]] + [folded]
        return kb.lookup_terms(" ".join(parts))
    return ()


def _choose_entry(
    hits: Sequence[tuple[KbEntry, str]], sentence: SentenceRecord
) -> tuple[KbEntry, str]:
    if len(hits) == 1:
        return hits[0]
    # Ambiguous surface: prefer a MEASUREMENT entry when the sentence talks
    # numbers, otherwise fall back to the smallest concept id.
    if any(t.shape in _NUMERIC for t in sentence.tokens):
        measurements = [h for h in hits if h[0].category is Category.MEASUREMENT]
        if measurements:
            return min(measurements, key=lambda h: h[0].concept_id)
    return min(hits, key=lambda h: h[0].concept_id)


def recognize_entities(
    sentence: SentenceRecord, kb: KnowledgeBase
) -> list[EntityMention]:
    """Greedy longest-match dictionary scan over token n-grams.

    On overlap the longer match wins; equal lengths resolve leftmost.
    Output is sorted by span start and pairwise non-overlapping.
    """

    toks = sentence.tokens
    candidates = []  # (ntokens, first_token, last_token, hits)
    for i in range(len(toks)):
        if toks[i].shape not in _MATCHABLE:
            continue
        max_n = min(MAX_NGRAM, len(toks) - i)
        for n in range(max_n, 0, -1):
            window = toks[i : i + n]
            if any(t.shape not in _MATCHABLE for t in window):
                continue
            hits = _lookup_window(window, kb)
            if hits:
                candidates.append((n, i, i + n - 1, hits))
    candidates.sort(key=lambda c: (-c[0], c[1]))
    taken: set[int] = set()
    mentions = []
    for n, first, last, hits in candidates:
        span_tokens = range(first, last + 1)
        if any(t in taken for t in span_tokens):
            continue
        taken.update(span_tokens)
        entry, term = _choose_entry(hits, sentence)
        start, end = toks[first].start, toks[last].end
        mentions.append(
            EntityMention(
                sentence_index=sentence.sentence_index,
                start=start,
                end=end,
                surface=sentence.text[start:end],
                concept_id=entry.concept_id,
                matched_term=term,
            )
        )
    mentions.sort(key=lambda m: m.start)
    return mentions


def _initials_match(abbr: str, long_form: str) -> bool:
    """True when the abbreviation's letters trace through the long form.

    The first letter must open the long form; the rest may come from word
    initials or word-interior letters, which also lets lowercase function
    words be skipped.  A trailing plural "s" on the abbreviation is ignored.
    """

    letters = abbr.lower()
    if len(letters) > 1 and letters.endswith("s"):
        letters = letters[:-1]
    if not (2 <= len(letters) <= 10):
        return False
    target = long_form.lower()
    if not target or letters[0] != target[0]:
        return False
    pos = 0
    for ch in letters:
        found = target.find(ch, pos)
        if found == -1:
            return False
        pos = found + 1
    return True


def _token_index_at_end(toks: Sequence[Token], end: int) -> int | None:
    for i, t in enumerate(toks):
        if t.end == end:
            return i
    return None


def link_abbreviations(
    sentences: Sequence[SentenceRecord],
    mentions: Sequence[EntityMention],
) -> list[EntityMention]:
    """Expand "<LongForm> (<ABBR>)" definitions across one record.

    ``mentions`` holds the recognized mentions of all sentences of the
    record.  Later occurrences of a defined short form are emitted as new
    mentions carrying the long form's concept id; everything else passes
    through unchanged.
    """

    by_sentence: dict[int, list[EntityMention]] = {}
    for m in mentions:
        by_sentence.setdefault(m.sentence_index, []).append(m)

    # (sentence_index, token_index) of the defining occurrence per surface
    definitions: dict[str, tuple[str, str, tuple[int, int]]] = {}
    for sentence in sentences:
        toks = sentence.tokens
        for m in by_sentence.get(sentence.sentence_index, ()):
            k = _token_index_at_end(toks, m.end)
            if k is None or k + 3 >= len(toks):
                continue
            if toks[k + 1].surface != "(" or toks[k + 3].surface != ")":
                continue
            abbr = toks[k + 2]
            if abbr.shape not in _MATCHABLE:
                continue
            if _initials_match(abbr.surface, m.surface):
                definitions.setdefault(
                    abbr.surface,
                    (m.concept_id, m.surface, (sentence.sentence_index, k + 2)),
                )

    if not definitions:
        return sorted(mentions, key=lambda m: (m.sentence_index, m.start))

    out = list(mentions)
    occupied = {
        (m.sentence_index, i)
        for sentence in sentences
        for m in by_sentence.get(sentence.sentence_index, ())
        for i, t in enumerate(sentence.tokens)
        if t.start >= m.start and t.end <= m.end
    }
    for sentence in sentences:
        for i, tok in enumerate(sentence.tokens):
            hit = definitions.get(tok.surface)
            if hit is None:
                continue
            concept_id, long_surface, defined_at = hit
            if (sentence.sentence_index, i) <= defined_at:
                continue
            if (sentence.sentence_index, i) in occupied:
                continue
            occupied.add((sentence.sentence_index, i))
            out.append(
                EntityMention(
                    sentence_index=sentence.sentence_index,
                    start=tok.start,
                    end=tok.end,
                    surface=tok.surface,
                    concept_id=concept_id,
                    matched_term=long_surface,
                )
            )
    out.sort(key=lambda m: (m.sentence_index, m.start))
    return out
