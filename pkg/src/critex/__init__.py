"""critex: structure clinical-trial free text into entity-attribute relations.

The library turns record text (eligibility criteria, result summaries) into
(entity, attribute, relation) triples by combining a knowledge base of
concept constraints with syntactic proximity, and evaluates output against
Brat gold annotations.
"""

from .attributes import (
    AttributeKind,
    AttributeMention,
    AttributeShape,
    Comparator,
    TimeUnit,
    attribute_shape,
    extract_attributes,
)
from .entities import EntityMention, link_abbreviations, recognize_entities
from .errors import (
    CritexError,
    CycleDetected,
    DanglingRef,
    DuplicateConceptId,
    MalformedAnn,
    MalformedJsonl,
    MalformedKb,
    ParseMismatch,
    RecordMismatch,
    SpanMismatch,
    UnknownConcept,
)
from .io_eval import (
    CorpusFormat,
    ElementType,
    EvalReport,
    GoldAnnotation,
    MatchMode,
    RelationPair,
    StructuredRecord,
    evaluate,
    from_json,
    read_brat,
    read_brat_dir,
    read_corpus,
    to_json,
)
from .kb import (
    Category,
    CompatibilityScore,
    CompatibilityWeights,
    KbEntry,
    KnowledgeBase,
    ValuePattern,
    import_tsv,
    load_kb,
    lookup,
    mine_kb_candidates,
    normalize_unit,
    save_kb,
    score_compatibility,
)
from .linker import (
    LinkerConfig,
    Relation,
    RelationCandidate,
    assign,
    generate_candidates,
    mix,
    p_sup,
)
from .pipeline import PipelineConfig, annotate_record
from .resources import bundled_kb_path, mini_corpus_dir
from .segmentation import SentenceRecord, SplitMode, Token, TokenShape, split_records, tokenize
from .syntax import (
    DependencyParse,
    SignalSource,
    SyntacticSignal,
    heuristic_distance,
    ingest_parse,
    p_dep,
    path_distance,
)

__version__ = "0.1.0"

__all__ = [
    "AttributeKind", "AttributeMention", "AttributeShape", "Comparator",
    "TimeUnit", "attribute_shape", "extract_attributes",
    "EntityMention", "link_abbreviations", "recognize_entities",
    "CritexError", "CycleDetected", "DanglingRef", "DuplicateConceptId",
    "MalformedAnn", "MalformedJsonl", "MalformedKb", "ParseMismatch",
    "RecordMismatch", "SpanMismatch", "UnknownConcept",
    "CorpusFormat", "ElementType", "EvalReport", "GoldAnnotation",
    "MatchMode", "RelationPair", "StructuredRecord", "evaluate",
    "from_json", "read_brat", "read_brat_dir", "read_corpus", "to_json",
    "Category", "CompatibilityScore", "CompatibilityWeights", "KbEntry",
    "KnowledgeBase", "ValuePattern", "import_tsv", "load_kb", "lookup",
    "mine_kb_candidates", "normalize_unit", "save_kb", "score_compatibility",
    "LinkerConfig", "Relation", "RelationCandidate", "assign",
    "generate_candidates", "mix", "p_sup",
    "PipelineConfig", "annotate_record",
    "bundled_kb_path", "mini_corpus_dir",
    "SentenceRecord", "SplitMode", "Token", "TokenShape", "split_records",
    "tokenize",
    "DependencyParse", "SignalSource", "SyntacticSignal",
    "heuristic_distance", "ingest_parse", "p_dep", "path_distance",
]
