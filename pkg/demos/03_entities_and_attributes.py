"""Entity recognition and the attribute grammar.

Entities come from dictionary matching over token n-grams (longest match
wins, plurals fold, parenthesized abbreviations become record-local
synonyms).  Attributes are parsed by a deterministic grammar covering
comparisons, ranges, ratios, temporal expressions, frequencies and
qualifiers.
"""

from critex import (
    SplitMode,
    bundled_kb_path,
    extract_attributes,
    link_abbreviations,
    load_kb,
    recognize_entities,
    split_records,
)

kb = load_kb(bundled_kb_path())

paragraph = (
    "Patients who are taking any concomitant medications that might confound "
    "assessments of pain relief, such as psychotropic drugs, antidepressants, "
    "sedative hypnotics or any analgesics taken within three days or five "
    "times of their elimination half-lives, whichever is longer."
)

sentences = split_records(paragraph, SplitMode.PARAGRAPHS)

# -- entities -------------------------------------------------------------------

mentions = []
for sentence in sentences:
    mentions.extend(recognize_entities(sentence, kb))
mentions = link_abbreviations(sentences, mentions)

print("entities:")
for m in mentions:
    print(f"  {m.surface!r:<28} -> {m.concept_id} (term: {m.matched_term})")

# -- attributes -------------------------------------------------------------------
# entity spans gate the closed-lexicon qualifiers ("concomitant" must sit
# next to an entity; "12-lead"-style compounds do not need one)

print("\nattributes:")
for sentence in sentences:
    spans = [(m.start, m.end) for m in mentions
             if m.sentence_index == sentence.sentence_index]
    for a in extract_attributes(sentence, kb, entity_spans=spans):
        payload = []
        if a.comparator:
            payload.append(f"cmp={a.comparator.name}")
        if a.values:
            payload.append(f"values={[int(v) if v == int(v) else v for v in a.values]}")
        if a.unit:
            payload.append(f"unit={a.unit}")
        if a.time_unit:
            payload.append(f"per={a.time_unit.name}")
        if a.anchor:
            payload.append(f"anchor={a.anchor!r}")
        print(f"  {a.kind.value:<10} {a.surface!r}")
        if payload:
            print(f"             {' '.join(payload)}")

# -- abbreviation expansion --------------------------------------------------------

text = "An electrocardiogram (ECG) was recorded at baseline.\nThe ECG was repeated."
sentences = split_records(text, SplitMode.LINES)
mentions = []
for sentence in sentences:
    mentions.extend(recognize_entities(sentence, kb))
expanded = link_abbreviations(sentences, mentions)
print("\nabbreviation expansion across the record:")
for m in expanded:
    print(f"  sentence {m.sentence_index}: {m.surface!r} -> {m.concept_id}")
