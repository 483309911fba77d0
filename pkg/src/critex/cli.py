"""Command-line interface: ``critex annotate | evaluate | kb | config``.

Exit codes: 0 on success, 2 on data errors (malformed inputs, span or
alignment failures), 64 on usage errors.  Output is deterministic: records
are processed in id order and repeated runs produce identical bytes, with
any number of workers.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import pipeline
from .errors import CritexError, ParseMismatch
from .io_eval import (
    ElementType,
    EvalReport,
    MatchMode,
    StructuredRecord,
    from_json,
    read_brat_dir,
    read_corpus,
    to_json,
)
from .kb import DEFAULT_WEIGHTS, KnowledgeBase, kb_to_dict, load_kb, mine_kb_candidates
from .linker import DEFAULT_MIN_SCORE, DEFAULT_THETA
from .resources import bundled_kb_path
from .segmentation import SplitMode, split_records
from .syntax import DEFAULT_BOUNDARY_PENALTY, DEFAULT_TAU, align_block, parse_blocks
from .entities import MAX_NGRAM

EXIT_OK = 0
EXIT_DATA_ERROR = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D102 - argparse hook
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _unit_interval(name):
    def parse(text):
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number") from None
        if not 0.0 <= value <= 1.0:
            raise argparse.ArgumentTypeError(f"{name} must be in [0, 1]")
        return value

    return parse


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected a positive integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return value


def _build_parser() -> _Parser:
    parser = _Parser(prog="critex", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    annotate = sub.add_parser("annotate", help="structure records into relations")
    annotate.add_argument("input", help="record file, directory of .txt, or .jsonl")
    annotate.add_argument("--kb", help="knowledge base path (default: $CRITEX_KB or bundled)")
    annotate.add_argument(
        "--mode", choices=("lines", "paragraphs"), default="lines",
        help="sentence layout of the records (default: lines)",
    )
    annotate.add_argument("--theta", type=_unit_interval("theta"), default=DEFAULT_THETA,
                          help="mixture weight of the compatibility signal")
    annotate.add_argument("--min-score", type=_unit_interval("min-score"),
                          default=DEFAULT_MIN_SCORE, help="assignment threshold")
    annotate.add_argument("--cross-sentence", action="store_true",
                          help="allow links between entities and attributes of different sentences")
    annotate.add_argument("--deps", help="external dependency parses (ID FORM HEAD DEPREL blocks)")
    annotate.add_argument("--extended", action="store_true",
                          help="include mention offsets, payloads and scores in the output")
    annotate.add_argument("--format", choices=("json", "jsonl"), default="json",
                          help="pretty documents or one line per record")
    annotate.add_argument("--out", help="write to a file instead of stdout")
    annotate.add_argument("--jobs", type=_positive_int, default=1,
                          help="worker threads (output identical for any value)")

    evaluate = sub.add_parser("evaluate", help="score predictions against Brat gold")
    evaluate.add_argument("--gold", required=True, help="directory of .txt/.ann pairs")
    evaluate.add_argument("--pred", required=True, help="JSONL of extended annotate output")
    evaluate.add_argument("--mode", choices=("exact", "overlap", "both"), default="both")
    evaluate.add_argument("--match-labels", action="store_true",
                          help="require relation labels to match")
    evaluate.add_argument("--format", choices=("table", "json"), default="table")

    kb_cmd = sub.add_parser("kb", help="knowledge-base utilities")
    kb_sub = kb_cmd.add_subparsers(dest="kb_command", required=True, parser_class=_Parser)
    kb_validate = kb_sub.add_parser("validate", help="check a knowledge-base file")
    kb_validate.add_argument("path")
    kb_mine = kb_sub.add_parser("mine", help="mine candidate entries from a corpus")
    kb_mine.add_argument("corpus", help="record file, directory of .txt, or .jsonl")
    kb_mine.add_argument("--out", required=True, help="candidate file to write (for curation)")
    kb_mine.add_argument("--mode", choices=("lines", "paragraphs"), default="lines")

    config = sub.add_parser("config", help="show configuration")
    config.add_argument("--show-defaults", action="store_true",
                        help="print all default parameters as JSON")

    return parser


def _resolve_kb_path(flag_value: str | None) -> Path:
    if flag_value:
        return Path(flag_value)
    env = os.environ.get("CRITEX_KB")
    if env:
        return Path(env)
    return bundled_kb_path()


def _load_parses(deps_path: str, records, mode: SplitMode):
    """Match parse blocks to the sentences of all records, in id order."""

    blocks = parse_blocks(Path(deps_path).read_text(encoding="utf-8"))
    parses_per_record = []
    cursor = 0
    for record_id, text in records:
        sentences = split_records(text, mode, record_id=record_id)
        if cursor + len(sentences) > len(blocks):
            raise ParseMismatch(
                cursor, f"{deps_path}: fewer parse blocks than sentences"
            )
        parses_per_record.append(
            [align_block(blocks[cursor + i], s) for i, s in enumerate(sentences)]
        )
        cursor += len(sentences)
    if cursor != len(blocks):
        raise ParseMismatch(cursor, f"{deps_path}: more parse blocks than sentences")
    return parses_per_record


def _cmd_annotate(args) -> int:
    kb = load_kb(_resolve_kb_path(args.kb))
    records = sorted(read_corpus(args.input), key=lambda r: r[0])
    mode = SplitMode(args.mode)
    config = pipeline.PipelineConfig(
        mode=mode,
        theta=args.theta,
        min_score=args.min_score,
        cross_sentence=args.cross_sentence,
    )
    parses_per_record = None
    if args.deps:
        parses_per_record = _load_parses(args.deps, records, mode)

    def annotate_one(item):
        index, (record_id, text) = item
        parses = parses_per_record[index] if parses_per_record else None
        return pipeline.annotate_record(record_id, text, kb, config, parses=parses)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(annotate_one, enumerate(records)))
    else:
        results = [annotate_one(item) for item in enumerate(records)]

    indent = None if args.format == "jsonl" else 2
    lines = [to_json(r, extended=args.extended, indent=indent) for r in results]
    payload = "\n".join(lines) + ("\n" if lines else "")
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
    else:
        sys.stdout.write(payload)
    return EXIT_OK


def _format_table(report: EvalReport) -> str:
    header = f"{'type':<10} {'mode':<8} {'precision':>9} {'recall':>9} {'f1':>9} {'tp':>5} {'fp':>5} {'fn':>5}"
    rows = [header, "-" * len(header)]
    for etype in ElementType:
        for mode in MatchMode:
            if (etype, mode) not in report.micro:
                continue
            c = report.counts(etype, mode)
            rows.append(
                f"{etype.value:<10} {mode.value:<8} "
                f"{c.precision:>9.3f} {c.recall:>9.3f} {c.f1:>9.3f} "
                f"{c.tp:>5d} {c.fp:>5d} {c.fn:>5d}"
            )
    rows.append(f"records: {report.n_records} (micro shown; use --format json for macro)")
    return "\n".join(rows)


def _cmd_evaluate(args) -> int:
    gold = read_brat_dir(args.gold)
    predictions: list[StructuredRecord] = []
    for line in Path(args.pred).read_text(encoding="utf-8").splitlines():
        if line.strip():
            predictions.append(from_json(line))
    mode = None if args.mode == "both" else MatchMode(args.mode.upper())
    from .io_eval import evaluate as run_evaluate

    report = run_evaluate(predictions, gold, mode=mode, match_labels=args.match_labels)
    if args.format == "json":
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(_format_table(report))
    return EXIT_OK


def _cmd_kb(args) -> int:
    if args.kb_command == "validate":
        kb = load_kb(args.path)
        print(f"OK: {len(kb.entries)} entries, {len(kb.unit_table)} unit variants")
        return EXIT_OK
    records = read_corpus(args.corpus)
    mode = SplitMode(args.mode)
    sentences = []
    for record_id, text in sorted(records, key=lambda r: r[0]):
        sentences.extend(split_records(text, mode, record_id=record_id))
    candidates = mine_kb_candidates(sentences)
    kb = KnowledgeBase.build(candidates)
    Path(args.out).write_text(
        json.dumps(kb_to_dict(kb), ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
    print(f"wrote {len(candidates)} candidate entries to {args.out}")
    return EXIT_OK


def _cmd_config(args) -> int:
    defaults = {
        "theta": DEFAULT_THETA,
        "min_score": DEFAULT_MIN_SCORE,
        "tau": DEFAULT_TAU,
        "boundary_penalty": DEFAULT_BOUNDARY_PENALTY,
        "weights": {
            "unit": DEFAULT_WEIGHTS.unit,
            "pattern": DEFAULT_WEIGHTS.pattern,
            "range": DEFAULT_WEIGHTS.range,
        },
        "max_ngram": MAX_NGRAM,
        "mode": "lines",
        "cross_sentence": False,
        "kb": str(bundled_kb_path()),
    }
    print(json.dumps(defaults, indent=2))
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "annotate":
            return _cmd_annotate(args)
        if args.command == "evaluate":
            return _cmd_evaluate(args)
        if args.command == "kb":
            return _cmd_kb(args)
        return _cmd_config(args)
    except CritexError as exc:
        print(f"critex: error: {exc}", file=sys.stderr)
        return EXIT_DATA_ERROR
    except FileNotFoundError as exc:
        print(f"critex: error: {exc}", file=sys.stderr)
        return EXIT_DATA_ERROR


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()
