"""Tokenization, sentence boundaries, and name-run extraction."""

from framecheck.text import Token, capitalized_runs, sentence_end, strip_possessive, tokens


def surfaces(text):
    return [text[s.start:s.end] for s in capitalized_runs(text)]


class TestTokens:
    def test_offsets_recover_surfaces(self):
        text = "Rubio voted against S. 1925."
        for tok in tokens(text):
            assert text[tok.start:tok.end] == tok.text

    def test_internal_apostrophes_and_hyphens_kept(self):
        got = [t.text for t in tokens("O'Malley's half-baked plan")]
        assert got == ["O'Malley's", "half-baked", "plan"]

    def test_leading_punctuation_skipped(self):
        assert [t.text for t in tokens('"Quote," she said.')] == ["Quote", "she", "said"]


class TestStripPossessive:
    def test_ascii_and_curly_forms(self):
        assert strip_possessive(Token("Rubio's", 0, 7)) == Token("Rubio", 0, 5)
        assert strip_possessive(Token("Rubio’s", 0, 7)) == Token("Rubio", 0, 5)

    def test_plain_word_untouched(self):
        tok = Token("Rubios", 0, 6)
        assert strip_possessive(tok) == tok


class TestSentenceEnd:
    def test_period_after_honorific_is_not_a_boundary(self):
        text = "Sen. Rubio voted. He said so."
        assert sentence_end(text, 0) == text.index("voted.") + len("voted")

    def test_single_letter_initial_is_not_a_boundary(self):
        text = "George W. Bush won. Then he left."
        assert sentence_end(text, 0) == text.index("won.") + len("won")

    def test_no_terminator_runs_to_text_end(self):
        text = "no terminator here"
        assert sentence_end(text, 0) == len(text)

    def test_question_mark_terminates(self):
        text = "Did he vote? Yes."
        assert sentence_end(text, 0) == text.index("?")


class TestCapitalizedRuns:
    def test_adjacent_capitals_merge_into_one_run(self):
        assert surfaces("Yesterday Marco Rubio voted against it.") == [
            "Yesterday Marco Rubio"
        ]

    def test_simple_name(self):
        assert surfaces("by then Marco Rubio voted against it.") == ["Marco Rubio"]

    def test_honorific_stripped_from_run(self):
        assert surfaces("Sen. Marco Rubio voted no.") == ["Marco Rubio"]

    def test_possessive_trimmed(self):
        assert "Chuck Grassley" in surfaces("That was Chuck Grassley's idea.")

    def test_initials_stay_in_one_run(self):
        assert surfaces("George W. Bush won")[0] == "George W. Bush"

    def test_multiple_runs_in_order(self):
        assert surfaces("Marco Rubio debated Chuck Schumer on air.") == [
            "Marco Rubio",
            "Chuck Schumer",
        ]

    def test_all_lowercase_yields_nothing(self):
        assert surfaces("nothing capitalized at all") == []
