"""Knowledge-base loading, unit normalization, lookup, scoring and mining."""

import json

import pytest

from critex.attributes import AttributeKind, AttributeMention, Comparator
from critex.errors import DuplicateConceptId, MalformedKb
from critex.kb import (
    Category,
    CompatibilityWeights,
    KbEntry,
    KnowledgeBase,
    ValuePattern,
    import_tsv,
    kb_to_dict,
    load_kb,
    lookup,
    mine_kb_candidates,
    normalize_unit,
    save_kb,
    score_compatibility,
)
from critex.segmentation import SplitMode, split_records


def attr(kind, values=(), unit=None, comparator=None):
    surface = "x"
    return AttributeMention(
        sentence_index=0, start=0, end=1, surface=surface, kind=kind,
        comparator=comparator, values=tuple(values), unit=unit,
    )


RATIO_MMHG = attr(AttributeKind.RATIO, (140, 90), "mmHg")
RATIO_115_75 = attr(AttributeKind.RATIO, (115, 75), "mmHg")
RANGE_11_25 = attr(AttributeKind.RANGE, (11, 25))
QUALIFIER = attr(AttributeKind.QUALIFIER)

BLOOD_PRESSURE = KbEntry(
    concept_id="C0005823", preferred_term="blood pressure",
    expected_units=("mmHg",), value_min=40, value_max=300,
    value_pattern=ValuePattern.RATIO, category=Category.MEASUREMENT,
)
BODY_WEIGHT = KbEntry(
    concept_id="C0005910", preferred_term="body weight",
    expected_units=("kg",), value_min=20, value_max=300,
    value_pattern=ValuePattern.SCALAR, category=Category.MEASUREMENT,
)


class TestLoadKb:
    def test_bundled_lookup_is_case_insensitive(self, mini_kb):
        entries = lookup("Blood Pressure", mini_kb)
        assert len(entries) == 1
        assert entries[0].concept_id == "C0005823"

    def test_empty_kb(self, tmp_path):
        path = tmp_path / "kb.json"
        path.write_text('{"version": 1, "units": {}, "entries": []}')
        kb = load_kb(path)
        assert len(kb.entries) == 0
        assert kb.lookup("anything") == []

    def test_inverted_range_rejected(self, tmp_path):
        path = tmp_path / "kb.json"
        path.write_text(json.dumps({
            "version": 1, "units": {},
            "entries": [{
                "concept_id": "LOCAL:x", "preferred_term": "x",
                "value_min": 10, "value_max": 5,
            }],
        }))
        with pytest.raises(MalformedKb):
            load_kb(path)

    def test_duplicate_concept_id_rejected(self, tmp_path):
        path = tmp_path / "kb.json"
        entry = {"concept_id": "LOCAL:x", "preferred_term": "x"}
        path.write_text(json.dumps({
            "version": 1, "units": {}, "entries": [entry, dict(entry)],
        }))
        with pytest.raises(DuplicateConceptId):
            load_kb(path)

    def test_bad_version_rejected(self, tmp_path):
        path = tmp_path / "kb.json"
        path.write_text('{"version": 99, "entries": []}')
        with pytest.raises(MalformedKb):
            load_kb(path)

    def test_synonym_duplicating_preferred_term_rejected(self):
        with pytest.raises(MalformedKb):
            KbEntry(concept_id="LOCAL:x", preferred_term="x", synonyms=("X",))

    def test_save_load_round_trip(self, mini_kb, tmp_path):
        path = tmp_path / "kb.json"
        save_kb(mini_kb, path)
        again = load_kb(path)
        assert again == mini_kb

    def test_expected_units_canonicalized_on_load(self, tmp_path):
        path = tmp_path / "kb.json"
        path.write_text(json.dumps({
            "version": 1, "units": {},
            "entries": [{
                "concept_id": "LOCAL:bmi", "preferred_term": "BMI",
                "expected_units": ["kg/m2"],
            }],
        }))
        kb = load_kb(path)
        assert kb.entries[0].expected_units == ("kg/m^2",)


class TestNormalizeUnit:
    @pytest.mark.parametrize(
        "surface,expected",
        [
            ("kg/m2", "kg/m^2"),
            ("kg/m^2", "kg/m^2"),
            ("kg per m2", "kg/m^2"),
            ("mmHg", "mmHg"),
            ("mm Hg", "mmHg"),
            ("banana", None),
            ("days", "day"),
            ("%", "%"),
        ],
    )
    def test_examples(self, surface, expected):
        assert normalize_unit(surface) == expected

    def test_kb_file_can_extend_unit_table(self, tmp_path):
        path = tmp_path / "kb.json"
        path.write_text(json.dumps({
            "version": 1, "units": {"torr": "mmHg"}, "entries": [],
        }))
        kb = load_kb(path)
        assert kb.normalize_unit("Torr") == "mmHg"

    def test_extra_units_survive_round_trip(self, tmp_path):
        path = tmp_path / "kb.json"
        path.write_text(json.dumps({
            "version": 1, "units": {"torr": "mmHg"}, "entries": [],
        }))
        kb = load_kb(path)
        out = tmp_path / "copy.json"
        save_kb(kb, out)
        assert load_kb(out) == kb


class TestLookup:
    def test_synonym_abbreviation(self, mini_kb):
        hits = lookup("SSRIs", mini_kb)
        assert len(hits) == 1
        assert hits[0].preferred_term == "selective serotonin reuptake inhibitor"

    def test_ecg_lowercase(self, mini_kb):
        hits = lookup("ecg", mini_kb)
        assert len(hits) == 1
        assert hits[0].concept_id == "C0013798"

    def test_unknown_term(self, mini_kb):
        assert lookup("xyzzy", mini_kb) == []

    def test_case_insensitivity_property(self, mini_kb):
        for entry in mini_kb.entries:
            for term in entry.terms:
                assert lookup(term.upper(), mini_kb) == lookup(term, mini_kb)


class TestScoreCompatibility:
    def test_full_match_scores_one(self):
        score = score_compatibility(BLOOD_PRESSURE, RATIO_MMHG)
        assert score.unit_matched and score.pattern_matched and score.range_matched
        assert score.value == pytest.approx(1.0)

    def test_unitless_range_scores_below_matching_ratio(self):
        high = score_compatibility(BLOOD_PRESSURE, RATIO_115_75).value
        low = score_compatibility(BLOOD_PRESSURE, RANGE_11_25).value
        assert low < high

    def test_wrong_unit_entry_scores_below_right_unit_entry(self):
        # Hand enumeration of the weight formula:
        #   blood pressure: unit 1*0.6 + pattern 1*0.25 + range 1*0.15 = 1.0
        #   body weight:    unit 0*0.6 + pattern 0*0.25 + range 1*0.15 = 0.15
        bp = score_compatibility(BLOOD_PRESSURE, RATIO_MMHG)
        bw = score_compatibility(BODY_WEIGHT, RATIO_MMHG)
        assert not bw.unit_matched
        assert bw.value == pytest.approx(0.15)
        assert bp.value == pytest.approx(1.0)
        assert bw.value < bp.value

    def test_missing_entry_constraint_scores_neutral_share(self):
        entry = KbEntry(
            concept_id="LOCAL:bp", preferred_term="blood pressure",
            expected_units=("mmHg",), value_pattern=ValuePattern.RATIO,
        )
        score = score_compatibility(entry, RATIO_MMHG)
        assert score.range_term == 0.5
        assert score.value == pytest.approx(0.6 + 0.25 + 0.5 * 0.15)

    def test_nonnumeric_attribute_uses_pattern_term_only(self):
        score = score_compatibility(BLOOD_PRESSURE, QUALIFIER)
        assert score.unit_term == 0.5
        assert score.range_term == 0.5
        assert score.pattern_term == 0.0
        assert score.value == pytest.approx(0.5 * 0.6 + 0.5 * 0.15)

    def test_value_recomputable_from_terms(self):
        w = CompatibilityWeights()
        for entry in (BLOOD_PRESSURE, BODY_WEIGHT):
            for attribute in (RATIO_MMHG, RANGE_11_25, QUALIFIER):
                s = score_compatibility(entry, attribute)
                expected = (
                    w.unit * s.unit_term
                    + w.pattern * s.pattern_term
                    + w.range * s.range_term
                )
                assert s.value == pytest.approx(expected)

    def test_monotone_in_matched_terms(self):
        # adding a matching unit to an otherwise identical attribute never
        # lowers the score
        without_unit = attr(AttributeKind.RATIO, (140, 90))
        with_unit = RATIO_MMHG
        assert (
            score_compatibility(BLOOD_PRESSURE, with_unit).value
            >= score_compatibility(BLOOD_PRESSURE, without_unit).value
        )

    def test_default_weights_ordering(self):
        w = CompatibilityWeights()
        assert w.unit > w.pattern > w.range
        assert w.unit + w.pattern + w.range == pytest.approx(1.0)

    def test_bad_weights_rejected(self):
        with pytest.raises(ValueError):
            CompatibilityWeights(unit=0.2, pattern=0.5, range=0.3)
        with pytest.raises(ValueError):
            CompatibilityWeights(unit=0.6, pattern=0.3, range=0.2)


class TestImportTsv:
    def test_three_column_table(self, tmp_path):
        path = tmp_path / "kb.tsv"
        path.write_text(
            "term\tvalue_range\tunits\n"
            "blood pressure\t90..250\tmmHg\n"
            "body weight\t\tkg, kilograms\n"
        )
        kb = import_tsv(path)
        assert len(kb.entries) == 2
        bp = kb.lookup("blood pressure")[0]
        assert bp.value_min == 90 and bp.value_max == 250
        assert bp.expected_units == ("mmHg",)
        assert bp.concept_id.startswith("LOCAL:")
        bw = kb.lookup("body weight")[0]
        assert bw.expected_units == ("kg",)

    def test_bad_range_rejected(self, tmp_path):
        path = tmp_path / "kb.tsv"
        path.write_text("term\tvalue_range\tunits\nheight\t10-20\tcm\n")
        with pytest.raises(MalformedKb):
            import_tsv(path)


class TestMining:
    def _sentences(self, text, mode=SplitMode.PARAGRAPHS):
        return split_records(text, mode)

    def test_blood_pressure_candidate(self, paragraph_two):
        candidates = mine_kb_candidates(self._sentences(paragraph_two))
        by_term = {c.preferred_term: c for c in candidates}
        assert "blood pressure" in by_term
        bp = by_term["blood pressure"]
        assert bp.expected_units == ("mmHg",)
        assert bp.value_pattern is ValuePattern.RATIO
        assert bp.concept_id == "LOCAL:blood-pressure"

    def test_no_numbers_no_candidates(self):
        sentences = self._sentences("Patients with a history of depression.")
        assert mine_kb_candidates(sentences) == []

    def test_bmi_candidate(self, criterion_line):
        candidates = mine_kb_candidates(self._sentences(criterion_line))
        by_term = {c.preferred_term: c for c in candidates}
        assert "Body Mass Index" in by_term
        bmi = by_term["Body Mass Index"]
        assert bmi.expected_units == ("kg/m^2",)
        assert bmi.value_pattern is ValuePattern.SCALAR

    def test_duplicates_merge_units_and_widen_pattern(self):
        text = "Glucose of 100 mg/dL. Glucose of 5-8 mmol/L."
        candidates = mine_kb_candidates(self._sentences(text))
        glucose = [c for c in candidates if c.preferred_term == "Glucose"]
        assert len(glucose) == 1
        assert set(glucose[0].expected_units) == {"mg/dL", "mmol/L"}
        assert glucose[0].value_pattern is ValuePattern.ANY

    def test_candidates_load_as_knowledge_base(self, paragraph_two):
        candidates = mine_kb_candidates(self._sentences(paragraph_two))
        kb = KnowledgeBase.build(candidates)
        assert kb_to_dict(kb)["version"] == 1
