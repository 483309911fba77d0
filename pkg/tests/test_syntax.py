"""Dependency-parse ingestion, distances, and the softmin distribution."""

import math

import pytest
from hypothesis import given, strategies as st

from critex.attributes import AttributeKind, AttributeMention, Comparator
from critex.entities import EntityMention
from critex.errors import CycleDetected, ParseMismatch
from critex.segmentation import SplitMode, split_records
from critex.syntax import (
    DependencyParse,
    SignalSource,
    SyntacticSignal,
    heuristic_distance,
    ingest_parse,
    p_dep,
    path_distance,
)


def sentence_of(text):
    return split_records(text, SplitMode.LINES)[0]


def entity(sentence, surface):
    start = sentence.text.index(surface)
    return EntityMention(
        sentence_index=sentence.sentence_index,
        start=start,
        end=start + len(surface),
        surface=surface,
        concept_id="LOCAL:x",
        matched_term=surface,
    )


def attribute(sentence, surface, kind=AttributeKind.RANGE, values=(1, 2)):
    start = sentence.text.index(surface)
    comparator = Comparator.LE if kind is AttributeKind.COMPARISON else None
    return AttributeMention(
        sentence_index=sentence.sentence_index,
        start=start,
        end=start + len(surface),
        surface=surface,
        kind=kind,
        comparator=comparator,
        values=tuple(values),
    )


# Hand-built tree for "Body Mass Index ≤ 40 kg/m^2": the value 40 is the
# root, "Index" is its subject with two compounds, the glyph and the unit
# attach to the value.
BMI_PARSE_TEXT = (
    "1\tBody\t3\tcompound\n"
    "2\tMass\t3\tcompound\n"
    "3\tIndex\t5\tnsubj\n"
    "4\t≤\t5\tcase\n"
    "5\t40\t0\troot\n"
    "6\tkg/m^2\t5\tnmod\n"
)


class TestIngestParse:
    def test_six_token_file(self, tmp_path, criterion_line):
        path = tmp_path / "deps.tsv"
        path.write_text(BMI_PARSE_TEXT)
        parse = ingest_parse(path, sentence_of(criterion_line))
        assert len(parse.heads) == 6
        assert parse.heads == (3, 3, 5, 5, 0, 5)
        assert parse.labels[4] == "root"

    def test_self_loop_rejected(self, tmp_path, criterion_line):
        bad = BMI_PARSE_TEXT.replace("3\tIndex\t5\tnsubj", "3\tIndex\t3\tnsubj")
        path = tmp_path / "deps.tsv"
        path.write_text(bad)
        with pytest.raises(CycleDetected):
            ingest_parse(path, sentence_of(criterion_line))

    def test_two_roots_rejected(self, tmp_path, criterion_line):
        bad = BMI_PARSE_TEXT.replace("3\tIndex\t5\tnsubj", "3\tIndex\t0\tnsubj")
        path = tmp_path / "deps.tsv"
        path.write_text(bad)
        with pytest.raises(CycleDetected):
            ingest_parse(path, sentence_of(criterion_line))

    def test_form_mismatch_reports_index(self, tmp_path, criterion_line):
        bad = BMI_PARSE_TEXT.replace("2\tMass\t3\tcompound", "2\tMASS\t3\tcompound")
        path = tmp_path / "deps.tsv"
        path.write_text(bad)
        with pytest.raises(ParseMismatch) as info:
            ingest_parse(path, sentence_of(criterion_line))
        assert info.value.index == 1

    def test_empty_file_empty_sentence(self, tmp_path):
        from critex.segmentation import SentenceRecord

        path = tmp_path / "deps.tsv"
        path.write_text("")
        sentence = SentenceRecord("r", 0, "", 0, ())
        parse = ingest_parse(path, sentence)
        assert parse.heads == ()

    def test_count_mismatch(self, tmp_path, criterion_line):
        path = tmp_path / "deps.tsv"
        path.write_text("1\tBody\t0\troot\n")
        with pytest.raises(ParseMismatch):
            ingest_parse(path, sentence_of(criterion_line))

    def test_block_selection_in_multi_sentence_file(self, tmp_path):
        path = tmp_path / "deps.tsv"
        path.write_text(
            "1\tpain\t0\troot\n"
            "\n"
            "1\tscreening\t0\troot\n"
        )
        parse = ingest_parse(path, sentence_of("screening"), block=1)
        assert parse.labels == ("root",)
        assert parse.sentence.tokens[0].surface == "screening"


class TestPathDistance:
    def test_directly_connected_spans(self, tmp_path, criterion_line):
        path = tmp_path / "deps.tsv"
        path.write_text(BMI_PARSE_TEXT)
        sentence = sentence_of(criterion_line)
        parse = ingest_parse(path, sentence)
        e = entity(sentence, "Body Mass Index")  # head token: Index (3)
        a = attribute(
            sentence, "≤ 40 kg/m^2", AttributeKind.COMPARISON, values=(40,)
        )
        # span head of the attribute is its last token kg/m^2 (6);
        # hand-counted path: kg/m^2 -> 40 -> Index = 2 edges
        signal = path_distance(parse, e, a)
        assert signal.distance == 2
        assert signal.source is SignalSource.EXTERNAL_PARSE

    def test_same_head_token_distance_zero(self, tmp_path):
        sentence = sentence_of("pain")
        path = tmp_path / "deps.tsv"
        path.write_text("1\tpain\t0\troot\n")
        parse = ingest_parse(path, sentence)
        e = entity(sentence, "pain")
        a = attribute(sentence, "pain", AttributeKind.QUALIFIER, values=())
        assert path_distance(parse, e, a).distance == 0

    def test_pressure_closer_than_ecg_in_tree(self, tmp_path):
        # Hand-drawn tree for the ECG / blood-pressure sentence; path
        # lengths counted by hand: pressure->140/90 = 2 edges, ECG->140/90 = 4.
        text = "A normal resting 12-lead electrocardiograph (ECG) and blood pressure of less than 140/90 mmHg."
        rows = [
            (1, "A", 5, "det"),
            (2, "normal", 5, "amod"),
            (3, "resting", 5, "amod"),
            (4, "12-lead", 5, "compound"),
            (5, "electrocardiograph", 0, "root"),
            (6, "(", 7, "punct"),
            (7, "ECG", 5, "appos"),
            (8, ")", 7, "punct"),
            (9, "and", 11, "cc"),
            (10, "blood", 11, "compound"),
            (11, "pressure", 5, "conj"),
            (12, "of", 15, "case"),
            (13, "less", 15, "advmod"),
            (14, "than", 13, "fixed"),
            (15, "140/90", 11, "nmod"),
            (16, "mmHg", 15, "nmod"),
            (17, ".", 5, "punct"),
        ]
        path = tmp_path / "deps.tsv"
        path.write_text("".join(f"{i}\t{f}\t{h}\t{d}\n" for i, f, h, d in rows))
        sentence = sentence_of(text)
        parse = ingest_parse(path, sentence)
        a = attribute(sentence, "140/90 mmHg", AttributeKind.RATIO, values=(140, 90))
        d_pressure = path_distance(parse, entity(sentence, "blood pressure"), a)
        d_ecg = path_distance(parse, entity(sentence, "ECG"), a)
        assert d_pressure.distance == 2
        assert d_ecg.distance == 4
        assert d_pressure.distance < d_ecg.distance

    def test_symmetry(self, tmp_path, criterion_line):
        path = tmp_path / "deps.tsv"
        path.write_text(BMI_PARSE_TEXT)
        sentence = sentence_of(criterion_line)
        parse = ingest_parse(path, sentence)
        e = entity(sentence, "Body Mass Index")
        a = attribute(sentence, "≤ 40 kg/m^2", AttributeKind.COMPARISON, values=(40,))
        forward = path_distance(parse, e, a).distance
        # swap the span roles: distance is over tree nodes, so it must match
        e_as_attr = attribute(sentence, "Body Mass Index", AttributeKind.QUALIFIER, values=())
        a_as_entity = entity(sentence, "≤ 40 kg/m^2")
        assert path_distance(parse, a_as_entity, e_as_attr).distance == forward


class TestHeuristicDistance:
    def test_adjacent_is_zero(self):
        sentence = sentence_of("ages 21-45")
        e = entity(sentence, "ages")
        a = attribute(sentence, "21-45")
        signal = heuristic_distance(sentence, e, a)
        assert signal.distance == 0
        assert signal.source is SignalSource.HEURISTIC

    def test_nearer_entity_gets_smaller_distance(self, paragraph_two):
        sentence = split_records(paragraph_two, SplitMode.PARAGRAPHS)[0]
        a = attribute(sentence, "21-45")
        d_ages = heuristic_distance(sentence, entity(sentence, "ages"), a)
        d_cocaine = heuristic_distance(sentence, entity(sentence, "cocaine"), a)
        assert d_ages.distance < d_cocaine.distance

    def test_boundary_arithmetic(self):
        # four plain tokens (is, low, so, glucose) plus one comma between
        # the spans, B=5 -> 4 + 5 = 9
        sentence = sentence_of("weight is low , so glucose 5-8")
        e = entity(sentence, "weight")
        a = attribute(sentence, "5-8", values=(5, 8))
        assert heuristic_distance(sentence, e, a).distance == 9

    def test_overlapping_spans_zero(self):
        sentence = sentence_of("five times of their elimination half-lives")
        e = entity(sentence, "elimination half-lives")
        a = attribute(
            sentence,
            "five times of their elimination half-lives",
            AttributeKind.FREQUENCY,
            values=(5,),
        )
        assert heuristic_distance(sentence, e, a).distance == 0


class TestPDep:
    def test_single_candidate(self):
        signals = [SyntacticSignal(3.0, SignalSource.HEURISTIC)]
        assert p_dep(signals) == [1.0]

    def test_equal_distances_split_evenly(self):
        signals = [
            SyntacticSignal(2.0, SignalSource.HEURISTIC),
            SyntacticSignal(2.0, SignalSource.HEURISTIC),
        ]
        assert p_dep(signals) == pytest.approx([0.5, 0.5])

    def test_softmin_values(self):
        # independent evaluation of the formula for distances [0, 4], tau=2:
        # p0 = 1 / (1 + e^-2), p1 = e^-2 / (1 + e^-2)
        z = 1.0 + math.exp(-2.0)
        signals = [
            SyntacticSignal(0.0, SignalSource.HEURISTIC),
            SyntacticSignal(4.0, SignalSource.HEURISTIC),
        ]
        probs = p_dep(signals, tau=2.0)
        assert probs == pytest.approx([1.0 / z, math.exp(-2.0) / z], abs=1e-12)
        assert probs == pytest.approx([0.881, 0.119], abs=5e-4)

    def test_mixed_sources_rejected(self):
        signals = [
            SyntacticSignal(1.0, SignalSource.HEURISTIC),
            SyntacticSignal(2.0, SignalSource.EXTERNAL_PARSE),
        ]
        with pytest.raises(ValueError):
            p_dep(signals)

    @given(
        st.lists(st.floats(min_value=0, max_value=500), min_size=1, max_size=8),
        st.floats(min_value=0.1, max_value=10),
    )
    def test_distribution_properties(self, distances, tau):
        signals = [SyntacticSignal(d, SignalSource.HEURISTIC) for d in distances]
        probs = p_dep(signals, tau=tau)
        assert all(p >= 0 for p in probs)
        assert sum(probs) == pytest.approx(1.0, abs=1e-9)

    @given(
        st.lists(st.floats(min_value=0, max_value=100), min_size=2, max_size=6),
        st.floats(min_value=0.5, max_value=50),
    )
    def test_shift_invariance(self, distances, shift):
        base = [SyntacticSignal(d, SignalSource.HEURISTIC) for d in distances]
        shifted = [SyntacticSignal(d + shift, SignalSource.HEURISTIC) for d in distances]
        assert p_dep(base) == pytest.approx(p_dep(shifted), abs=1e-9)

    @given(st.lists(st.integers(min_value=0, max_value=50), min_size=2, max_size=6, unique=True))
    def test_strictly_order_reversing(self, distances):
        signals = [SyntacticSignal(float(d), SignalSource.HEURISTIC) for d in distances]
        probs = p_dep(signals)
        order_by_distance = sorted(range(len(distances)), key=lambda i: distances[i])
        order_by_prob = sorted(range(len(probs)), key=lambda i: -probs[i])
        assert order_by_distance == order_by_prob
