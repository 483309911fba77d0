"""Knowledge base of clinical concepts with unit, pattern and range constraints.

Each entry pairs a concept (UMLS-CUI-style id plus terms) with what its
values normally look like: expected units, a numeric shape (scalar, ratio,
range), and a plausibility range.  Those constraints drive compatibility
scoring between an entry and a parsed attribute, the evidence the linker
mixes with syntactic proximity.  Units matter more than values here: trial
values are routinely outside normal ranges, but a value written with the
concept's unit is strong evidence.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .attributes import AttributeMention, AttributeShape, attribute_shape
from .errors import DuplicateConceptId, MalformedKb
from .segmentation import SentenceRecord, TokenShape
from .units import DEFAULT_UNIT_TABLE, normalize_unit as _normalize_with_table

KB_SCHEMA_VERSION = 1


class ValuePattern(Enum):
    SCALAR = "SCALAR"
    RATIO = "RATIO"
    RANGE = "RANGE"
    ANY = "ANY"


class Category(Enum):
    MEASUREMENT = "MEASUREMENT"
    DRUG = "DRUG"
    CONDITION = "CONDITION"
    PROCEDURE = "PROCEDURE"
    DEMOGRAPHIC = "DEMOGRAPHIC"
    OTHER = "OTHER"


@dataclass(frozen=True)
class KbEntry:
    """One concept row: terms plus unit/pattern/range constraints."""

    concept_id: str
    preferred_term: str
    synonyms: tuple[str, ...] = ()
    expected_units: tuple[str, ...] = ()
    value_min: float | None = None
    value_max: float | None = None
    value_pattern: ValuePattern | None = None
    category: Category = Category.OTHER

    def __post_init__(self):
        if not self.preferred_term:
            raise MalformedKb(f"{self.concept_id}: empty preferred_term")
        seen = set()
        for syn in self.synonyms:
            key = syn.casefold()
            if key == self.preferred_term.casefold():
                raise MalformedKb(
                    f"{self.concept_id}: synonym duplicates preferred_term: {syn!r}"
                )
            if key in seen:
                raise MalformedKb(f"{self.concept_id}: duplicate synonym: {syn!r}")
            seen.add(key)
        if (
            self.value_min is not None
            and self.value_max is not None
            and self.value_min > self.value_max
        ):
            raise MalformedKb(
                f"{self.concept_id}: value_min {self.value_min} > value_max {self.value_max}"
            )

    @property
    def terms(self) -> tuple[str, ...]:
        return (self.preferred_term, *self.synonyms)


@dataclass(frozen=True)
class KnowledgeBase:
    """Immutable bundle of entries plus the term and unit lookup tables."""

    entries: tuple[KbEntry, ...]
    term_index: dict[str, tuple[tuple[KbEntry, str], ...]]
    unit_table: dict[str, str]
    by_id: dict[str, KbEntry]

    @classmethod
    def build(
        cls,
        entries: Iterable[KbEntry],
        extra_units: dict[str, str] | None = None,
    ) -> "KnowledgeBase":
        entries = tuple(entries)
        by_id: dict[str, KbEntry] = {}
        for entry in entries:
            if entry.concept_id in by_id:
                raise DuplicateConceptId(f"duplicate concept_id: {entry.concept_id}")
            by_id[entry.concept_id] = entry
        unit_table = dict(DEFAULT_UNIT_TABLE)
        if extra_units:
            unit_table.update({k.lower(): v for k, v in extra_units.items()})
        index: dict[str, list[tuple[KbEntry, str]]] = {}
        for entry in entries:
            for term in entry.terms:
                index.setdefault(term.casefold(), []).append((entry, term))
        return cls(
            entries=entries,
            term_index={k: tuple(v) for k, v in index.items()},
            unit_table=unit_table,
            by_id=by_id,
        )

    def normalize_unit(self, surface: str) -> str | None:
        key = " ".join(surface.split()).lower()
        return self.unit_table.get(key) if key else None

    def lookup_terms(self, phrase: str) -> tuple[tuple[KbEntry, str], ...]:
        """Matching (entry, fired term) pairs for a surface phrase."""

        return self.term_index.get(" ".join(phrase.split()).casefold(), ())

    def lookup(self, phrase: str) -> list[KbEntry]:
        return [entry for entry, _ in self.lookup_terms(phrase)]

    def entry(self, concept_id: str) -> KbEntry | None:
        return self.by_id.get(concept_id)


def lookup(phrase: str, kb: KnowledgeBase) -> list[KbEntry]:
    """Case-insensitive exact match over preferred terms and synonyms."""

    return kb.lookup(phrase)


def normalize_unit(surface: str, kb: KnowledgeBase | None = None) -> str | None:
    """Canonical unit for a surface form, or None when unknown."""

    if kb is not None:
        return kb.normalize_unit(surface)
    return _normalize_with_table(surface)


# ---------------------------------------------------------------------------
# Compatibility scoring
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CompatibilityWeights:
    """Weights of the unit, pattern and range terms (unit dominates)."""

    unit: float = 0.6
    pattern: float = 0.25
    range: float = 0.15

    def __post_init__(self):
        if not (self.unit > self.pattern > self.range > 0):
            raise ValueError("weights must satisfy unit > pattern > range > 0")
        if abs(self.unit + self.pattern + self.range - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")


DEFAULT_WEIGHTS = CompatibilityWeights()

_NEUTRAL = 0.5  # share contributed by a constraint the entry does not declare


@dataclass(frozen=True)
class CompatibilityScore:
    """Weighted agreement between an entry's constraints and an attribute.

    Each term contributes 1.0 when it matches, 0.0 when it conflicts, and
    a neutral 0.5 when the entry does not constrain it (or the attribute is
    non-numeric and the term is vacuous), so
    ``value == w_u * unit_term + w_p * pattern_term + w_r * range_term``.
    """

    value: float
    unit_matched: bool
    pattern_matched: bool
    range_matched: bool
    unit_term: float
    pattern_term: float
    range_term: float


def _pattern_term(entry: KbEntry, shape: AttributeShape) -> float:
    if entry.value_pattern is None:
        return _NEUTRAL
    if shape is AttributeShape.NONNUMERIC:
        # a declared value pattern (even ANY) describes numeric payloads;
        # non-numeric attributes cannot confirm it
        return 0.0
    if entry.value_pattern is ValuePattern.ANY:
        return 1.0
    return 1.0 if entry.value_pattern.value == shape.value else 0.0


def score_compatibility(
    entry: KbEntry,
    attribute: AttributeMention,
    weights: CompatibilityWeights = DEFAULT_WEIGHTS,
) -> CompatibilityScore:
    """Score how well an attribute fits an entry's constraints.

    Non-numeric attributes (temporal, frequency, qualifier) are judged by
    the pattern term only; their unit and range terms are vacuous and score
    the neutral share.
    """

    shape = attribute_shape(attribute)
    numeric = shape is not AttributeShape.NONNUMERIC

    if not numeric or not entry.expected_units:
        unit_term = _NEUTRAL
    elif attribute.unit is not None and attribute.unit in entry.expected_units:
        unit_term = 1.0
    else:
        unit_term = 0.0

    pattern_term = _pattern_term(entry, shape)

    if not numeric or (entry.value_min is None and entry.value_max is None):
        range_term = _NEUTRAL
    else:
        lo = entry.value_min if entry.value_min is not None else float("-inf")
        hi = entry.value_max if entry.value_max is not None else float("inf")
        in_range = all(lo <= v <= hi for v in attribute.values)
        range_term = 1.0 if in_range else 0.0

    value = (
        weights.unit * unit_term
        + weights.pattern * pattern_term
        + weights.range * range_term
    )
    return CompatibilityScore(
        value=min(1.0, max(0.0, value)),
        unit_matched=unit_term == 1.0,
        pattern_matched=pattern_term == 1.0,
        range_matched=range_term == 1.0,
        unit_term=unit_term,
        pattern_term=pattern_term,
        range_term=range_term,
    )


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _entry_from_dict(raw: dict, where: str) -> KbEntry:
    if not isinstance(raw, dict):
        raise MalformedKb(f"{where}: entry must be an object")
    required = ("concept_id", "preferred_term")
    for key in required:
        if not isinstance(raw.get(key), str) or not raw.get(key):
            raise MalformedKb(f"{where}: missing or invalid field {key!r}")
    for key, kind in (("synonyms", list), ("expected_units", list)):
        if key in raw and not isinstance(raw[key], kind):
            raise MalformedKb(f"{where}: field {key!r} must be a list")
    for key in ("value_min", "value_max"):
        if raw.get(key) is not None and not isinstance(raw[key], (int, float)):
            raise MalformedKb(f"{where}: field {key!r} must be a number")
    pattern = raw.get("value_pattern")
    if pattern is not None:
        try:
            pattern = ValuePattern(pattern)
        except ValueError:
            raise MalformedKb(f"{where}: unknown value_pattern {pattern!r}") from None
    try:
        category = Category(raw.get("category", "OTHER"))
    except ValueError:
        raise MalformedKb(f"{where}: unknown category {raw.get('category')!r}") from None
    return KbEntry(
        concept_id=raw["concept_id"],
        preferred_term=raw["preferred_term"],
        synonyms=tuple(raw.get("synonyms", ())),
        expected_units=tuple(raw.get("expected_units", ())),
        value_min=raw.get("value_min"),
        value_max=raw.get("value_max"),
        value_pattern=pattern,
        category=category,
    )


def _canonicalize_entry_units(entry: KbEntry, unit_table: dict[str, str]) -> KbEntry:
    canonical = tuple(
        unit_table.get(u.lower(), u) for u in entry.expected_units
    )
    if canonical == entry.expected_units:
        return entry
    return replace(entry, expected_units=canonical)


def load_kb(path: str | Path) -> KnowledgeBase:
    """Load and validate a knowledge-base JSON document."""

    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedKb(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise MalformedKb(f"{path}: top level must be an object")
    if doc.get("version") != KB_SCHEMA_VERSION:
        raise MalformedKb(f"{path}: unsupported version {doc.get('version')!r}")
    units = doc.get("units", {})
    if not isinstance(units, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in units.items()
    ):
        raise MalformedKb(f"{path}: 'units' must map variants to canonical strings")
    raw_entries = doc.get("entries", [])
    if not isinstance(raw_entries, list):
        raise MalformedKb(f"{path}: 'entries' must be a list")
    unit_table = dict(DEFAULT_UNIT_TABLE)
    unit_table.update({k.lower(): v for k, v in units.items()})
    entries = []
    for i, raw in enumerate(raw_entries):
        entry = _entry_from_dict(raw, f"{path}: entries[{i}]")
        entries.append(_canonicalize_entry_units(entry, unit_table))
    return KnowledgeBase.build(entries, extra_units=units)


def kb_to_dict(kb: KnowledgeBase) -> dict:
    extra = {k: v for k, v in kb.unit_table.items() if DEFAULT_UNIT_TABLE.get(k) != v}
    return {
        "version": KB_SCHEMA_VERSION,
        "units": extra,
        "entries": [
            {
                "concept_id": e.concept_id,
                "preferred_term": e.preferred_term,
                "synonyms": list(e.synonyms),
                "expected_units": list(e.expected_units),
                "value_min": e.value_min,
                "value_max": e.value_max,
                "value_pattern": e.value_pattern.value if e.value_pattern else None,
                "category": e.category.value,
            }
            for e in kb.entries
        ],
    }


def save_kb(kb: KnowledgeBase, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(kb_to_dict(kb), ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )


_RANGE_SPEC_RE = re.compile(r"\s*(-?\d+(?:\.\d+)?)\s*\.\.\s*(-?\d+(?:\.\d+)?)\s*")


def import_tsv(path: str | Path) -> KnowledgeBase:
    """Import a three-column table: term, value_range ("90..250"), units.

    Rows become curated entries with ``LOCAL:`` concept ids; units are
    comma-separated and normalized against the built-in table.
    """

    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        return KnowledgeBase.build(())
    header = [c.strip().lower() for c in lines[0].split("\t")]
    try:
        term_col = header.index("term")
        range_col = header.index("value_range")
        units_col = header.index("units")
    except ValueError:
        raise MalformedKb(f"{path}: header must name term, value_range, units") from None
    entries = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) <= max(term_col, range_col, units_col):
            raise MalformedKb(f"{path}:{lineno}: expected 3 columns")
        term = cols[term_col].strip()
        if not term:
            raise MalformedKb(f"{path}:{lineno}: empty term")
        value_min = value_max = None
        range_spec = cols[range_col].strip()
        if range_spec:
            m = _RANGE_SPEC_RE.fullmatch(range_spec)
            if not m:
                raise MalformedKb(f"{path}:{lineno}: bad value_range {range_spec!r}")
            value_min, value_max = float(m.group(1)), float(m.group(2))
        units = tuple(
            dict.fromkeys(
                _normalize_with_table(u.strip()) or u.strip()
                for u in cols[units_col].split(",")
                if u.strip()
            )
        )
        entries.append(
            KbEntry(
                concept_id=f"LOCAL:{_slug(term)}",
                preferred_term=term,
                expected_units=units,
                value_min=value_min,
                value_max=value_max,
                category=Category.MEASUREMENT if units else Category.OTHER,
            )
        )
    return KnowledgeBase.build(entries)


# ---------------------------------------------------------------------------
# Candidate mining
# ---------------------------------------------------------------------------

_MINING_STOPWORDS = frozenset(
    """a an the of with and or to in for on at by any all their who whom which
    that is are was were has have been be such as not no from this these
    those it its than least most more less under over within between
    taking taken use used must""".split()
)

_CONNECTORS = frozenset({"of", "is", "was", "are", "were"})
_COMPARATOR_WORDS = frozenset(
    {"less", "greater", "more", "than", "at", "least", "most", "no", "under", "over"}
)

_SHAPE_TO_PATTERN = {
    TokenShape.NUMBER: ValuePattern.SCALAR,
    TokenShape.RATIO: ValuePattern.RATIO,
    TokenShape.RANGE: ValuePattern.RANGE,
}


def _slug(term: str) -> str:
    cleaned = re.sub(r"[^0-9A-Za-z]+", "-", term.strip().lower()).strip("-")
    return cleaned or "term"


def mine_kb_candidates(corpus: Sequence[SentenceRecord]) -> list[KbEntry]:
    """Mine candidate entries from "<noun phrase> <connector> <number> [unit]".

    Noun phrases are detected by token shape plus a stop-word list rather
    than part-of-speech tags; the output is meant for human curation and is
    never loaded automatically.  Duplicate terms merge their units; pattern
    conflicts widen to ANY.
    """

    found: dict[str, KbEntry] = {}
    for sentence in corpus:
        toks = sentence.tokens
        for i, tok in enumerate(toks):
            pattern = _SHAPE_TO_PATTERN.get(tok.shape)
            if pattern is None:
                continue
            # walk left over connector/comparator tokens
            j = i - 1
            connectors = 0
            while j >= 0:
                word = toks[j].surface.lower()
                if word in _CONNECTORS or word in _COMPARATOR_WORDS:
                    connectors += 1
                    j -= 1
                elif toks[j].shape is TokenShape.SYMBOL:
                    connectors += 1
                    j -= 1
                else:
                    break
            if connectors == 0:
                continue
            # noun phrase: run of plain words, newest first, capped at 4
            np_end = j
            while (
                j >= 0
                and np_end - j < 4
                and toks[j].shape is TokenShape.WORD
                and toks[j].surface.lower() not in _MINING_STOPWORDS
            ):
                j -= 1
            if j == np_end:
                continue
            term = sentence.text[toks[j + 1].start : toks[np_end].end]
            unit = None
            if i + 1 < len(toks):
                unit = _normalize_with_table(toks[i + 1].surface)
            key = _slug(term)
            units = (unit,) if unit else ()
            prior = found.get(key)
            if prior is None:
                found[key] = KbEntry(
                    concept_id=f"LOCAL:{key}",
                    preferred_term=term,
                    expected_units=units,
                    value_pattern=pattern,
                    category=Category.MEASUREMENT if unit else Category.OTHER,
                )
            else:
                merged_units = tuple(dict.fromkeys(prior.expected_units + units))
                merged_pattern = (
                    prior.value_pattern
                    if prior.value_pattern == pattern
                    else ValuePattern.ANY
                )
                found[key] = replace(
                    prior,
                    expected_units=merged_units,
                    value_pattern=merged_pattern,
                )
    return [found[k] for k in sorted(found)]
