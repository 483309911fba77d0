"""Structured JSON output and evaluation against Brat gold annotations.

The compact document shape is fixed ({"result": {"id", "text",
"relation"}}), an extended payload adds offsets and scores, and the
evaluator reports span-level precision/recall/F1 in exact and overlap
modes against .txt/.ann gold pairs.
"""

import json

from critex import (
    ElementType,
    MatchMode,
    PipelineConfig,
    SplitMode,
    annotate_record,
    bundled_kb_path,
    evaluate,
    load_kb,
    mini_corpus_dir,
    read_brat_dir,
    read_corpus,
    to_json,
)

kb = load_kb(bundled_kb_path())

# -- compact and extended output ---------------------------------------------

record = annotate_record("demo", "Body Mass Index ≤ 40 kg/m^2", kb)
print("compact document:")
print(to_json(record, indent=2))

print("\nparsed payload of the attribute (from the extended output):")
print(json.dumps(record.extended["attributes"][0], ensure_ascii=False, indent=2))

# -- the bundled annotated corpus -----------------------------------------------

corpus = mini_corpus_dir()
records = sorted(read_corpus(corpus), key=lambda r: r[0])
gold = read_brat_dir(corpus)
print(f"\nbundled corpus: {len(records)} records, "
      f"{sum(len(g.relations) for g in gold)} gold relations")

config = PipelineConfig(mode=SplitMode.PARAGRAPHS)
predictions = [annotate_record(rid, text, kb, config) for rid, text in records]

report = evaluate(predictions, gold)
print(f"\n{'type':<10} {'mode':<8} {'P':>6} {'R':>6} {'F1':>6}")
for etype in ElementType:
    for mode in MatchMode:
        c = report.counts(etype, mode)
        print(f"{etype.value:<10} {mode.value:<8} "
              f"{c.precision:6.3f} {c.recall:6.3f} {c.f1:6.3f}")

# the misses worth reading: anchors that absorb a knowledge-base concept
# ("... prior to screening") let that concept win on zero distance, which
# a human annotator does not do
