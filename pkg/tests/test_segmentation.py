"""Sentence splitting and tokenization."""

import string

import pytest
from hypothesis import given, strategies as st

from critex.segmentation import (
    SentenceRecord,
    SplitMode,
    TokenShape,
    split_records,
    tokenize,
)


class TestSplitRecords:
    def test_paragraph_split_two_sentences(self, paragraph_two):
        sentences = split_records(paragraph_two, SplitMode.PARAGRAPHS)
        assert len(sentences) == 2
        assert sentences[0].text.startswith("M/F ages 21-45")
        assert sentences[1].text.startswith("A normal")
        assert sentences[1].char_offset == paragraph_two.index("A normal")

    def test_empty_input(self):
        assert split_records("", SplitMode.PARAGRAPHS) == []
        assert split_records("", SplitMode.LINES) == []

    def test_lines_mode(self):
        sentences = split_records("BMI <= 40 kg/m2\nAge >= 18", SplitMode.LINES)
        assert len(sentences) == 2
        assert [s.sentence_index for s in sentences] == [0, 1]
        assert sentences[0].text == "BMI <= 40 kg/m2"
        assert sentences[1].text == "Age >= 18"

    def test_lines_mode_skips_blank_lines(self):
        sentences = split_records("first\n\n  \nsecond\n", SplitMode.LINES)
        assert [s.text for s in sentences] == ["first", "second"]
        assert [s.sentence_index for s in sentences] == [0, 1]

    def test_abbreviation_does_not_split(self):
        text = "Stable dose (e.g. 20 mg) is required. Next sentence here."
        sentences = split_records(text, SplitMode.PARAGRAPHS)
        assert len(sentences) == 2
        assert sentences[1].text == "Next sentence here."

    def test_single_initial_does_not_split(self):
        text = "Reviewed by J. Smith before enrollment. Patients signed consent."
        sentences = split_records(text, SplitMode.PARAGRAPHS)
        assert len(sentences) == 2
        assert sentences[0].text.endswith("enrollment.")

    def test_period_inside_parentheses_does_not_split(self):
        text = "Weight limit (approx. 50 kg) applies. Second part."
        sentences = split_records(text, SplitMode.PARAGRAPHS)
        assert len(sentences) == 2

    def test_round_trip_offsets(self, paragraph_one, paragraph_two):
        for raw in (paragraph_one, paragraph_two):
            for mode in SplitMode:
                for s in split_records(raw, mode):
                    assert raw[s.char_offset : s.char_offset + len(s.text)] == s.text

    def test_record_id_carried(self):
        sentences = split_records("one line", SplitMode.LINES, record_id="NCT123")
        assert sentences[0].record_id == "NCT123"


class TestTokenize:
    def test_criterion_tokens_and_shapes(self, criterion_line):
        tokens = tokenize(criterion_line)
        assert [t.surface for t in tokens] == ["Body", "Mass", "Index", "≤", "40", "kg/m^2"]
        assert [t.shape for t in tokens] == [
            TokenShape.WORD,
            TokenShape.WORD,
            TokenShape.WORD,
            TokenShape.SYMBOL,
            TokenShape.NUMBER,
            TokenShape.UNIT_LIKE,
        ]

    def test_ratio_is_single_token(self):
        tokens = tokenize("blood pressure of less than 140/90 mmHg")
        ratio = [t for t in tokens if t.surface == "140/90"]
        assert len(ratio) == 1
        assert ratio[0].shape is TokenShape.RATIO

    def test_range_is_single_token(self):
        tokens = tokenize("ages 21-45")
        assert [t.surface for t in tokens] == ["ages", "21-45"]
        assert tokens[1].shape is TokenShape.RANGE

    def test_numeric_qualifier_is_single_word_token(self):
        tokens = tokenize("a 12-lead ECG")
        lead = [t for t in tokens if t.surface == "12-lead"]
        assert len(lead) == 1
        assert lead[0].shape is TokenShape.WORD

    def test_parentheses_are_punct(self):
        tokens = tokenize("electrocardiograph (ECG)")
        shapes = {t.surface: t.shape for t in tokens}
        assert shapes["("] is TokenShape.PUNCT
        assert shapes[")"] is TokenShape.PUNCT
        assert shapes["ECG"] is TokenShape.WORD

    def test_comparison_glyphs_are_symbols(self):
        for glyph in ("≤", "≥", "<", ">", "=", "<=", ">="):
            tokens = tokenize(f"value {glyph} 5")
            assert any(
                t.surface == glyph and t.shape is TokenShape.SYMBOL for t in tokens
            )

    def test_compound_units_stay_single(self):
        for surface in ("kg/m^2", "kg/m2", "mmHg", "mg/dL", "mmol/L"):
            tokens = tokenize(f"40 {surface}")
            assert tokens[1].surface == surface
            assert tokens[1].shape is TokenShape.UNIT_LIKE

    def test_hyphenated_word_stays_single(self):
        tokens = tokenize("elimination half-lives")
        assert [t.surface for t in tokens] == ["elimination", "half-lives"]

    def test_thousands_separator(self):
        tokens = tokenize("dose of 1,000 mg")
        assert any(
            t.surface == "1,000" and t.shape is TokenShape.NUMBER for t in tokens
        )

    def test_offsets_reconstruct_text(self, paragraph_one):
        tokens = tokenize(paragraph_one)
        for t in tokens:
            assert paragraph_one[t.start : t.end] == t.surface
        for prev, nxt in zip(tokens, tokens[1:]):
            assert prev.end <= nxt.start

    def test_idempotent_on_token_surfaces(self, paragraph_two):
        for token in tokenize(paragraph_two):
            again = tokenize(token.surface)
            assert len(again) == 1
            assert again[0].surface == token.surface
            assert again[0].shape is token.shape

    def test_numeric_shapes_contain_no_letters(self, paragraph_one, paragraph_two):
        numeric = (TokenShape.NUMBER, TokenShape.RATIO, TokenShape.RANGE)
        for text in (paragraph_one, paragraph_two):
            for t in tokenize(text):
                if t.shape in numeric:
                    assert not any(c.isalpha() for c in t.surface)


@given(st.text(alphabet=string.printable + "≤≥–", max_size=200))
def test_tokenize_spans_are_valid_on_arbitrary_text(text):
    tokens = tokenize(text)
    last_end = 0
    for t in tokens:
        assert 0 <= t.start < t.end <= len(text)
        assert text[t.start : t.end] == t.surface
        assert t.start >= last_end
        last_end = t.end


@given(st.text(alphabet=string.printable, max_size=200))
def test_split_records_offsets_on_arbitrary_text(text):
    for mode in SplitMode:
        for s in split_records(text, mode):
            assert isinstance(s, SentenceRecord)
            assert text[s.char_offset : s.char_offset + len(s.text)] == s.text
            assert s.text.strip() == s.text
