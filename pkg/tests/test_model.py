"""Core data model: spans, claims, frames, verdicts, gold records."""

import json
from datetime import date

import pytest

from framecheck.model import (
    SCALE_5,
    Claim,
    DataError,
    FrameElement,
    FrameInstance,
    GoldRecord,
    ParsedClaim,
    Span,
    Verdict,
    VerdictLabel,
    VerdictParseError,
    check_frame_spans,
    claim_from_dict,
    claim_to_dict,
    consolidate_verdict,
    frame_from_dict,
    frame_to_dict,
    gold_record_from_dict,
    gold_record_to_dict,
    load_claims,
    load_gold_records,
    make_parsed_claim,
    parse_verdict_label,
    render_verdict_label,
    write_gold_records,
)

TEXT = "Marco Rubio voted against the bill."


def vote_frame() -> FrameInstance:
    return FrameInstance(
        frame_name="Vote",
        target=Span(12, 17),
        elements={
            "Agent": FrameElement(span=Span(0, 11), text="Marco Rubio"),
            "Position": FrameElement(span=Span(18, 25), text="against"),
        },
    )


class TestSpan:
    def test_slice_recovers_surface(self):
        assert Span(0, 11).slice(TEXT) == "Marco Rubio"

    @pytest.mark.parametrize("start,end", [(-1, 2), (3, 3), (5, 2)])
    def test_rejects_degenerate_bounds(self, start, end):
        with pytest.raises(DataError):
            Span(start, end)

    def test_orderable_by_position(self):
        assert sorted([Span(5, 9), Span(0, 3), Span(5, 7)]) == [
            Span(0, 3),
            Span(5, 7),
            Span(5, 9),
        ]


class TestClaim:
    def test_blank_text_rejected(self):
        with pytest.raises(DataError):
            Claim(id="x", text="   ")

    def test_round_trip(self):
        claim = Claim(id="c9", text=TEXT, speaker="someone", claim_date=date(2021, 5, 1))
        assert claim_from_dict(claim_to_dict(claim)) == claim


class TestVerdictLabels:
    @pytest.mark.parametrize(
        "raw,expected",
        [
            ("True", VerdictLabel.TRUE),
            ("mostly true", VerdictLabel.MOSTLY_TRUE),
            ("MOSTLY-TRUE", VerdictLabel.MOSTLY_TRUE),
            ("Half True", VerdictLabel.HALF_TRUE),
            ("half-true", VerdictLabel.HALF_TRUE),
            ("pants on fire", VerdictLabel.PANTS_ON_FIRE),
            ("Irrelevant", VerdictLabel.IRRELEVANT),
        ],
    )
    def test_parse_normalizes_case_and_hyphens(self, raw, expected):
        assert parse_verdict_label(raw) is expected

    def test_parse_rejects_unknown(self):
        with pytest.raises(VerdictParseError):
            parse_verdict_label("plausible")

    def test_round_trip_through_render(self):
        for label in VerdictLabel:
            assert parse_verdict_label(render_verdict_label(label)) is label

    def test_consolidation_folds_pants_on_fire_into_false(self):
        assert consolidate_verdict(VerdictLabel.PANTS_ON_FIRE) is VerdictLabel.FALSE
        for label in SCALE_5:
            assert consolidate_verdict(label) is label

    def test_scale_excludes_input_only_labels(self):
        assert VerdictLabel.PANTS_ON_FIRE not in SCALE_5
        assert VerdictLabel.IRRELEVANT not in SCALE_5
        assert len(SCALE_5) == 5


class TestFrameInstances:
    def test_span_surface_invariant_enforced(self):
        bad = FrameInstance(
            frame_name="Vote",
            target=Span(12, 17),
            elements={"Agent": FrameElement(span=Span(0, 11), text="WRONG")},
        )
        with pytest.raises(DataError):
            check_frame_spans(TEXT, bad)

    def test_span_beyond_text_rejected(self):
        runaway = FrameInstance(frame_name="Vote", target=Span(0, 500))
        with pytest.raises(DataError):
            check_frame_spans(TEXT, runaway)

    def test_round_trip(self):
        frame = vote_frame()
        assert frame_from_dict(frame_to_dict(frame)) == frame

    def test_parsed_claim_requires_target_order(self):
        claim = Claim(id="c", text=TEXT)
        early = FrameInstance(frame_name="Vote", target=Span(12, 17))
        late = FrameInstance(frame_name="Vote", target=Span(18, 25))
        with pytest.raises(DataError):
            ParsedClaim(claim=claim, frames=(late, early))

    def test_make_parsed_claim_sorts_by_target(self):
        claim = Claim(id="c", text=TEXT)
        early = FrameInstance(frame_name="Vote", target=Span(12, 17))
        late = FrameInstance(frame_name="Capability", target=Span(18, 25))
        parsed = make_parsed_claim(claim, [late, early])
        assert [f.frame_name for f in parsed.frames] == ["Vote", "Capability"]


class TestGoldRecords:
    def record(self, **kwargs) -> GoldRecord:
        base = dict(
            claim=Claim(id="g1", text=TEXT),
            gold_verdict=VerdictLabel.TRUE,
            gold_bill_ids=("s1925-112",),
            gold_table_ids=(),
            gold_frames=(),
        )
        base.update(kwargs)
        return GoldRecord(**base)

    def test_requires_exactly_one_evidence_kind(self):
        with pytest.raises(DataError):
            self.record(gold_table_ids=("life_expectancy",))
        with pytest.raises(DataError):
            self.record(gold_bill_ids=())

    def test_round_trip(self):
        rec = self.record(gold_frames=(vote_frame(),))
        assert gold_record_from_dict(gold_record_to_dict(rec)) == rec

    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "gold.jsonl"
        records = [
            self.record(),
            self.record(
                claim=Claim(id="g2", text="Japan leads in life expectancy."),
                gold_bill_ids=(),
                gold_table_ids=("life_expectancy",),
            ),
        ]
        write_gold_records(path, records)
        assert load_gold_records(path) == records

    def test_duplicate_claim_ids_rejected(self, tmp_path):
        path = tmp_path / "dupes.jsonl"
        write_gold_records(path, [self.record()])
        line = path.read_text().strip()
        path.write_text(line + "\n" + line + "\n")
        with pytest.raises(DataError):
            load_gold_records(path)


class TestClaimFiles:
    def test_load_claims(self, fixtures_dir):
        claims = load_claims(fixtures_dir / "claims" / "survey_claims.jsonl")
        assert [c.id for c in claims] == [f"s{i}" for i in range(1, 9)]

    def test_duplicate_ids_rejected(self, tmp_path):
        path = tmp_path / "claims.jsonl"
        row = json.dumps({"id": "dup", "text": "Something happened."})
        path.write_text(row + "\n" + row + "\n")
        with pytest.raises(DataError):
            load_claims(path)


def test_verdict_carries_evidence_refs():
    verdict = Verdict(
        label=VerdictLabel.TRUE, explanation="checks out", evidence_refs=("s1925-112",)
    )
    assert verdict.evidence_refs == ("s1925-112",)
