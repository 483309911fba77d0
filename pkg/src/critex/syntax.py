"""Syntactic proximity between an entity and an attribute.

Two interchangeable sources produce a distance: an ingested external
dependency parse (shortest undirected tree path between the span head
tokens) or a built-in clause-proximity heuristic (token gap plus a penalty
per crossed clause boundary).  A softmin turns the distances of the
entities competing for one attribute into a probability distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

from .attributes import AttributeMention
from .entities import EntityMention
from .errors import CycleDetected, ParseMismatch
from .segmentation import SentenceRecord

DEFAULT_TAU = 2.0
DEFAULT_BOUNDARY_PENALTY = 5.0

_BOUNDARY_SURFACES = frozenset({",", ";"})
_BOUNDARY_WORDS = frozenset({"and", "or", "but", "who", "whom", "which", "that", "whose"})


class SignalSource(Enum):
    EXTERNAL_PARSE = "EXTERNAL_PARSE"
    HEURISTIC = "HEURISTIC"


@dataclass(frozen=True)
class SyntacticSignal:
    distance: float
    source: SignalSource

    def __post_init__(self):
        if not math.isfinite(self.distance) or self.distance < 0:
            raise ValueError("distance must be finite and non-negative")


@dataclass(frozen=True)
class DependencyParse:
    """One head (0 = root, else 1-based index) and label per token."""

    heads: tuple[int, ...]
    labels: tuple[str, ...]
    sentence: SentenceRecord | None = None

    def __post_init__(self):
        n = len(self.heads)
        if len(self.labels) != n:
            raise CycleDetected("heads and labels must have equal length")
        if n == 0:
            return
        roots = sum(1 for h in self.heads if h == 0)
        if roots != 1:
            raise CycleDetected(f"head graph must have exactly one root, found {roots}")
        for i, head in enumerate(self.heads):
            if not (0 <= head <= n):
                raise CycleDetected(f"token {i + 1} heads out of range: {head}")
            if head == i + 1:
                raise CycleDetected(f"token {i + 1} heads to itself")
        # every token must reach the root
        for i in range(n):
            seen = set()
            node = i + 1
            while node != 0:
                if node in seen:
                    raise CycleDetected(f"cycle through token {node}")
                seen.add(node)
                node = self.heads[node - 1]


def parse_blocks(text: str) -> list[list[tuple[int, str, int, str]]]:
    """Split a token-per-line file into per-sentence blocks.

    Each line carries tab-separated ID, FORM, HEAD, DEPREL columns; blank
    lines separate sentences.
    """

    blocks: list[list[tuple[int, str, int, str]]] = []
    current: list[tuple[int, str, int, str]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            if current:
                blocks.append(current)
                current = []
            continue
        cols = line.split("\t")
        if len(cols) < 4:
            raise ParseMismatch(lineno, f"line {lineno}: expected 4 tab-separated columns")
        try:
            idx = int(cols[0])
            head = int(cols[2])
        except ValueError:
            raise ParseMismatch(
                lineno, f"line {lineno}: ID and HEAD must be integers"
            ) from None
        current.append((idx, cols[1], head, cols[3]))
    if current:
        blocks.append(current)
    return blocks


def ingest_parse(
    file: str | Path, sentence: SentenceRecord, block: int = 0
) -> DependencyParse:
    """Read one parse block and align it to a tokenized sentence.

    FORM must equal the token surface at every position; the head graph must
    be a tree.
    """

    text = Path(file).read_text(encoding="utf-8")
    blocks = parse_blocks(text)
    if not blocks:
        if not sentence.tokens:
            return DependencyParse((), (), sentence)
        raise ParseMismatch(0, f"{file}: no parse block for non-empty sentence")
    if block >= len(blocks):
        raise ParseMismatch(0, f"{file}: block {block} not present")
    return align_block(blocks[block], sentence)


def align_block(
    rows: Sequence[tuple[int, str, int, str]], sentence: SentenceRecord
) -> DependencyParse:
    if len(rows) != len(sentence.tokens):
        raise ParseMismatch(
            min(len(rows), len(sentence.tokens)),
            f"parse has {len(rows)} tokens, sentence has {len(sentence.tokens)}",
        )
    heads = []
    labels = []
    for i, (idx, form, head, deprel) in enumerate(rows):
        if form != sentence.tokens[i].surface:
            raise ParseMismatch(
                i, f"token {i}: parse FORM {form!r} != surface {sentence.tokens[i].surface!r}"
            )
        heads.append(head)
        labels.append(deprel)
    return DependencyParse(tuple(heads), tuple(labels), sentence)


def _head_token_index(sentence: SentenceRecord, start: int, end: int) -> int:
    """Index of the span's head token: the last token overlapping the span."""

    head = None
    for i, t in enumerate(sentence.tokens):
        if t.start < end and t.end > start:
            head = i
    if head is None:
        raise ValueError(f"span [{start}, {end}) covers no token")
    return head


def _depth_chain(heads: Sequence[int], node: int) -> list[int]:
    chain = [node]
    while node != 0:
        node = heads[node - 1]
        chain.append(node)
    return chain


def path_distance(
    parse: DependencyParse, e: EntityMention, a: AttributeMention
) -> SyntacticSignal:
    """Shortest undirected tree path between the two span head tokens."""

    if parse.sentence is None:
        raise ValueError("parse is not aligned to a sentence")
    sent = parse.sentence
    u = _head_token_index(sent, e.start, e.end) + 1
    v = _head_token_index(sent, a.start, a.end) + 1
    if u == v:
        return SyntacticSignal(0.0, SignalSource.EXTERNAL_PARSE)
    chain_u = _depth_chain(parse.heads, u)
    pos_u = {node: depth for depth, node in enumerate(chain_u)}
    depth_v = 0
    node = v
    while node not in pos_u:
        node = parse.heads[node - 1]
        depth_v += 1
    return SyntacticSignal(float(pos_u[node] + depth_v), SignalSource.EXTERNAL_PARSE)


def _is_boundary(surface: str) -> bool:
    return surface in _BOUNDARY_SURFACES or surface.lower() in _BOUNDARY_WORDS


def heuristic_distance(
    sentence: SentenceRecord,
    e: EntityMention,
    a: AttributeMention,
    boundary_penalty: float = DEFAULT_BOUNDARY_PENALTY,
) -> SyntacticSignal:
    """Clause-proximity fallback: token gap plus a per-boundary penalty.

    Boundary tokens (commas, semicolons, coordinating conjunctions, relative
    pronouns) between the spans are charged ``boundary_penalty`` each; the
    remaining in-between tokens count 1 each.  Overlapping spans score 0.
    """

    left_end = min(e.end, a.end)
    right_start = max(e.start, a.start)
    if left_end > right_start:  # overlapping spans
        return SyntacticSignal(0.0, SignalSource.HEURISTIC)
    gap = 0
    boundaries = 0
    for t in sentence.tokens:
        if t.start >= left_end and t.end <= right_start:
            if _is_boundary(t.surface):
                boundaries += 1
            else:
                gap += 1
    return SyntacticSignal(
        float(gap) + boundary_penalty * boundaries, SignalSource.HEURISTIC
    )


def p_dep(signals: Sequence[SyntacticSignal], tau: float = DEFAULT_TAU) -> list[float]:
    """Softmin over distances: closer entities get larger probability.

    ``p_i = exp(-d_i / tau) / sum_j exp(-d_j / tau)``.  All signals must
    come from the same source; the result sums to 1.
    """

    if not signals:
        raise ValueError("p_dep needs at least one signal")
    sources = {s.source for s in signals}
    if len(sources) > 1:
        raise ValueError("signals mix parse-based and heuristic distances")
    if tau <= 0:
        raise ValueError("tau must be positive")
    # shift by the minimum distance for numeric stability (softmin is
    # invariant to uniform shifts)
    d_min = min(s.distance for s in signals)
    weights = [math.exp(-(s.distance - d_min) / tau) for s in signals]
    total = sum(weights)
    return [w / total for w in weights]
