"""Structured output, gold-annotation reading, and span-level evaluation.

The compact output document has a fixed shape::

    {"result": {"id": ..., "text": ..., "relation": [
        {"entity": ..., "attribute": ...}, ...]}}

with key order id, text, relation, and entity before attribute inside each
relation object.  Surfaces are verbatim substrings of the record text; the
optional "extended" payload adds mention offsets, parsed attribute payloads,
per-relation scores and unlinked attributes, and is what the evaluator
consumes.  Gold annotations come from Brat standoff (.txt/.ann) files.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Sequence

from .errors import (
    DanglingRef,
    MalformedAnn,
    MalformedJsonl,
    RecordMismatch,
    SpanMismatch,
)

ENTITY_LABELS = frozenset({"Entity"})
ATTRIBUTE_LABELS = frozenset({"Attribute", "Value", "Temporal", "Qualifier"})


@dataclass(frozen=True)
class RelationPair:
    entity: str
    attribute: str


@dataclass
class StructuredRecord:
    """Per-record output: id, text, and the linked relation surfaces."""

    id: str
    text: str
    relations: list[RelationPair] = field(default_factory=list)
    extended: dict | None = None


_EMPTY_EXTENDED = {
    "entities": [],
    "attributes": [],
    "relations": [],
    "scores": [],
    "unlinked_attributes": [],
}


def to_json(record: StructuredRecord, extended: bool = False, indent: int | None = None) -> str:
    """Serialize a record; key order is fixed for byte-stable output."""

    result = {
        "id": record.id,
        "text": record.text,
        "relation": [
            {"entity": p.entity, "attribute": p.attribute} for p in record.relations
        ],
    }
    if extended:
        result["extended"] = record.extended if record.extended is not None else dict(_EMPTY_EXTENDED)
    return json.dumps({"result": result}, ensure_ascii=False, indent=indent)


def from_json(text: str) -> StructuredRecord:
    doc = json.loads(text)
    result = doc["result"]
    return StructuredRecord(
        id=result["id"],
        text=result["text"],
        relations=[
            RelationPair(entity=r["entity"], attribute=r["attribute"])
            for r in result.get("relation", [])
        ],
        extended=result.get("extended"),
    )


# ---------------------------------------------------------------------------
# Brat standoff gold annotations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GoldSpan:
    ref: str
    label: str
    start: int
    end: int
    surface: str


@dataclass(frozen=True)
class GoldRelation:
    ref: str
    label: str
    entity: GoldSpan
    attribute: GoldSpan


@dataclass
class GoldAnnotation:
    record_id: str
    text: str
    entities: list[GoldSpan] = field(default_factory=list)
    attributes: list[GoldSpan] = field(default_factory=list)
    relations: list[GoldRelation] = field(default_factory=list)


_T_LINE_RE = re.compile(r"(T\d+)\t(\S+) (\d+) (\d+)\t(.*)")
_R_LINE_RE = re.compile(r"(R\d+)\t(\S+) Arg1:(T\d+) Arg2:(T\d+)\s*")


def read_brat(txt: str, ann: str, record_id: str = "") -> GoldAnnotation:
    """Parse Brat standoff annotations against their source text.

    Span lines ("T1\\tEntity 0 15\\tsurface") must slice the text exactly;
    relation lines ("R1\\thas_value Arg1:T1 Arg2:T2") must reference declared
    spans, one entity and one attribute.
    """

    gold = GoldAnnotation(record_id=record_id, text=txt)
    spans: dict[str, GoldSpan] = {}
    pending_relations: list[tuple[str, str, str, str]] = []
    for lineno, line in enumerate(ann.splitlines(), start=1):
        if not line.strip() or line[0] in "#AEN":
            continue  # notes and attribute/event lines are not used here
        if line.startswith("T"):
            m = _T_LINE_RE.fullmatch(line)
            if not m:
                raise MalformedAnn(f"line {lineno}: cannot parse span line: {line!r}")
            ref, label, start, end, surface = (
                m.group(1), m.group(2), int(m.group(3)), int(m.group(4)), m.group(5),
            )
            if txt[start:end] != surface:
                raise SpanMismatch(
                    ref,
                    f"{ref}: surface {surface!r} != text[{start}:{end}] {txt[start:end]!r}",
                )
            span = GoldSpan(ref, label, start, end, surface)
            if label in ENTITY_LABELS:
                gold.entities.append(span)
            elif label in ATTRIBUTE_LABELS:
                gold.attributes.append(span)
            else:
                raise MalformedAnn(f"line {lineno}: unknown span label {label!r}")
            spans[ref] = span
        elif line.startswith("R"):
            m = _R_LINE_RE.fullmatch(line)
            if not m:
                raise MalformedAnn(f"line {lineno}: cannot parse relation line: {line!r}")
            pending_relations.append((m.group(1), m.group(2), m.group(3), m.group(4)))
        else:
            raise MalformedAnn(f"line {lineno}: unknown line type: {line!r}")

    entity_refs = {s.ref for s in gold.entities}
    attribute_refs = {s.ref for s in gold.attributes}
    for ref, label, arg1, arg2 in pending_relations:
        for arg in (arg1, arg2):
            if arg not in spans:
                raise DanglingRef(ref, f"{ref}: argument {arg} is not declared")
        if arg1 in entity_refs and arg2 in attribute_refs:
            entity, attribute = spans[arg1], spans[arg2]
        elif arg2 in entity_refs and arg1 in attribute_refs:
            entity, attribute = spans[arg2], spans[arg1]
        else:
            raise DanglingRef(
                ref, f"{ref}: arguments must pair one entity with one attribute"
            )
        gold.relations.append(GoldRelation(ref, label, entity, attribute))
    return gold


def read_brat_dir(path: str | Path) -> list[GoldAnnotation]:
    """Read all .txt/.ann sibling pairs in a directory, sorted by id."""

    path = Path(path)
    out = []
    for txt_path in sorted(path.glob("*.txt")):
        ann_path = txt_path.with_suffix(".ann")
        ann_text = ann_path.read_text(encoding="utf-8") if ann_path.exists() else ""
        out.append(
            read_brat(
                txt_path.read_text(encoding="utf-8"), ann_text, record_id=txt_path.stem
            )
        )
    return out


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

class ElementType(Enum):
    ENTITY = "ENTITY"
    ATTRIBUTE = "ATTRIBUTE"
    RELATION = "RELATION"


class MatchMode(Enum):
    EXACT = "EXACT"
    OVERLAP = "OVERLAP"


@dataclass(frozen=True)
class Counts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def __add__(self, other: "Counts") -> "Counts":
        return Counts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)


@dataclass
class EvalReport:
    """Micro counts and macro averages per element type and match mode."""

    micro: dict[tuple[ElementType, MatchMode], Counts]
    macro: dict[tuple[ElementType, MatchMode], tuple[float, float, float]]
    n_records: int

    def counts(self, etype: ElementType, mode: MatchMode) -> Counts:
        return self.micro[(etype, mode)]

    def to_dict(self) -> dict:
        out: dict = {"records": self.n_records, "micro": {}, "macro": {}}
        for (etype, mode), c in sorted(
            self.micro.items(), key=lambda kv: (kv[0][0].value, kv[0][1].value)
        ):
            out["micro"].setdefault(etype.value, {})[mode.value] = {
                "precision": c.precision,
                "recall": c.recall,
                "f1": c.f1,
                "tp": c.tp,
                "fp": c.fp,
                "fn": c.fn,
            }
        for (etype, mode), (p, r, f1) in sorted(
            self.macro.items(), key=lambda kv: (kv[0][0].value, kv[0][1].value)
        ):
            out["macro"].setdefault(etype.value, {})[mode.value] = {
                "precision": p,
                "recall": r,
                "f1": f1,
            }
        return out


def _spans_overlap(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] < b[1] and b[0] < a[1]


def _match_counts(pred, gold, mode: MatchMode, same, overlapping) -> Counts:
    """Greedy matching by offset; each gold item matches one prediction.

    OVERLAP runs an exact pass first so exact matches are never stolen by a
    merely overlapping pair (keeps EXACT tp <= OVERLAP tp).
    """

    pred = sorted(pred, key=lambda x: x[0])
    gold = sorted(gold, key=lambda x: x[0])
    matched_pred: set[int] = set()
    matched_gold: set[int] = set()

    def run_pass(test) -> None:
        for i, p in enumerate(pred):
            if i in matched_pred:
                continue
            for j, g in enumerate(gold):
                if j in matched_gold:
                    continue
                if test(p, g):
                    matched_pred.add(i)
                    matched_gold.add(j)
                    break

    run_pass(same)
    if mode is MatchMode.OVERLAP:
        run_pass(overlapping)
    tp = len(matched_pred)
    return Counts(tp=tp, fp=len(pred) - tp, fn=len(gold) - tp)


def _record_counts(
    record: StructuredRecord, gold: GoldAnnotation, mode: MatchMode, match_labels: bool
) -> dict[ElementType, Counts]:
    ext = record.extended
    if ext is None:
        raise ValueError(f"record {record.id}: extended payload required for evaluation")
    pred_entities = [((e["start"], e["end"]),) for e in ext["entities"]]
    pred_attributes = [((a["start"], a["end"]),) for a in ext["attributes"]]
    pred_relations = [
        (
            (
                ext["entities"][r["entity"]]["start"],
                ext["entities"][r["entity"]]["end"],
            ),
            (
                ext["attributes"][r["attribute"]]["start"],
                ext["attributes"][r["attribute"]]["end"],
            ),
            r["label"],
        )
        for r in ext["relations"]
    ]
    gold_entities = [((s.start, s.end),) for s in gold.entities]
    gold_attributes = [((s.start, s.end),) for s in gold.attributes]
    gold_relations = [
        (
            (r.entity.start, r.entity.end),
            (r.attribute.start, r.attribute.end),
            r.label,
        )
        for r in gold.relations
    ]

    def span_exact(p, g):
        return p[0] == g[0]

    def span_overlap(p, g):
        return _spans_overlap(p[0], g[0])

    def rel_labels_ok(p, g):
        return not match_labels or p[2] == g[2]

    def rel_exact(p, g):
        return p[0] == g[0] and p[1] == g[1] and rel_labels_ok(p, g)

    def rel_overlap(p, g):
        return (
            _spans_overlap(p[0], g[0])
            and _spans_overlap(p[1], g[1])
            and rel_labels_ok(p, g)
        )

    return {
        ElementType.ENTITY: _match_counts(
            pred_entities, gold_entities, mode, span_exact, span_overlap
        ),
        ElementType.ATTRIBUTE: _match_counts(
            pred_attributes, gold_attributes, mode, span_exact, span_overlap
        ),
        ElementType.RELATION: _match_counts(
            pred_relations, gold_relations, mode, rel_exact, rel_overlap
        ),
    }


def evaluate(
    predictions: Sequence[StructuredRecord],
    gold: Sequence[GoldAnnotation],
    mode: MatchMode | None = None,
    match_labels: bool = False,
) -> EvalReport:
    """Span-level precision/recall/F1, aligned by record id.

    ``mode=None`` evaluates both EXACT and OVERLAP.  Micro metrics pool
    counts over records; macro metrics average per-record scores.
    """

    pred_by_id = {r.id: r for r in predictions}
    gold_by_id = {g.record_id: g for g in gold}
    if set(pred_by_id) != set(gold_by_id):
        missing = set(gold_by_id) ^ set(pred_by_id)
        raise RecordMismatch(f"prediction/gold ids differ: {sorted(missing)}")
    modes = [mode] if mode is not None else [MatchMode.EXACT, MatchMode.OVERLAP]

    micro: dict[tuple[ElementType, MatchMode], Counts] = {}
    per_record: dict[tuple[ElementType, MatchMode], list[Counts]] = {}
    for record_id in sorted(pred_by_id):
        for m in modes:
            counts = _record_counts(
                pred_by_id[record_id], gold_by_id[record_id], m, match_labels
            )
            for etype, c in counts.items():
                key = (etype, m)
                micro[key] = micro.get(key, Counts()) + c
                per_record.setdefault(key, []).append(c)

    macro = {}
    for key, counts_list in per_record.items():
        n = len(counts_list)
        macro[key] = (
            sum(c.precision for c in counts_list) / n,
            sum(c.recall for c in counts_list) / n,
            sum(c.f1 for c in counts_list) / n,
        )
    return EvalReport(micro=micro, macro=macro, n_records=len(pred_by_id))


# ---------------------------------------------------------------------------
# Corpus reading
# ---------------------------------------------------------------------------

class CorpusFormat(Enum):
    TXT_DIR = "txt_dir"
    JSONL = "jsonl"


def read_corpus(
    path: str | Path, format: CorpusFormat | None = None
) -> list[tuple[str, str]]:
    """Read records as (id, text) pairs.

    A directory is one ``*.txt`` file per record (id = filename stem); a
    JSONL file carries one ``{"id", "text"}`` object per line.  A plain text
    file is treated as a single record.
    """

    path = Path(path)
    if format is None:
        if path.is_dir():
            format = CorpusFormat.TXT_DIR
        elif path.suffix == ".jsonl":
            format = CorpusFormat.JSONL
        else:
            return [(path.stem, path.read_text(encoding="utf-8"))]
    if format is CorpusFormat.TXT_DIR:
        return [
            (p.stem, p.read_text(encoding="utf-8")) for p in sorted(path.glob("*.txt"))
        ]
    records = []
    for lineno, line in enumerate(
        path.read_text(encoding="utf-8").splitlines(), start=1
    ):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedJsonl(lineno, f"line {lineno}: invalid JSON: {exc}") from None
        if not isinstance(doc, dict) or "id" not in doc or "text" not in doc:
            raise MalformedJsonl(lineno, f"line {lineno}: object needs 'id' and 'text'")
        records.append((str(doc["id"]), str(doc["text"])))
    return records
