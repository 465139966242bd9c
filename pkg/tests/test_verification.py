"""Tests for verdict synthesis: alignment, aggregation, line parsing, scoring."""

import json

import pytest

from framecheck.congress import Bill
from framecheck.gateway import Gateway, ProviderConfig, ProviderKind
from framecheck.model import (
    Claim,
    EvaluationError,
    GoldRecord,
    Verdict,
    VerdictLabel,
    parse_verdict_label,
)
from framecheck.oecd.query import QueryPlan, execute_plan
from framecheck.verification import (
    Alignment,
    AlignmentLabel,
    Prediction,
    VerificationError,
    VoteEvidence,
    aggregate_vote_verdict,
    align_claim_bill,
    build_aggregate_prompt,
    build_alignment_prompt,
    build_oecd_prompt,
    naive_verify,
    parse_verdict_line,
    score_verification,
    verify_oecd,
)

CLAIM = Claim(id="v1", text="Marco Rubio voted for the 2017 tax overhaul.")
BILL = Bill(
    bill_id="hr1-115",
    congress=115,
    title="Tax Cuts and Jobs Act",
    summary="Rewrites the individual and corporate tax code.",
)


def chat_gateway(transport):
    config = ProviderConfig(
        kind=ProviderKind.REMOTE_CHAT, model_name="test-model", endpoint="local://test"
    )
    return Gateway(config, transport=transport)


def scripted(*replies):
    """Transport that pops canned replies and records the prompts it saw."""
    queue = list(replies)
    prompts = []

    def transport(config, prompt, params):
        prompts.append(prompt)
        return queue.pop(0)

    return transport, prompts


def label_reply(label: str, explanation: str = "because") -> str:
    return json.dumps({"Label": label, "Explanation": explanation})


def make_evidence(n: int) -> list[VoteEvidence]:
    return [
        VoteEvidence(
            bill=Bill(bill_id=f"b{i}-115", congress=115, title=f"Bill {i}", summary="s"),
            position="Yea",
            alignment=Alignment(label=AlignmentLabel.SUPPORTS, explanation=f"e{i}"),
        )
        for i in range(1, n + 1)
    ]


class TestAlignmentPrompt:
    def test_prompt_lays_out_claim_then_vote(self):
        prompt = build_alignment_prompt(CLAIM, BILL, "Yea")
        assert prompt.startswith(
            "A fact-checker is assessing this claim:\n\n"
            "Claim: Marco Rubio voted for the 2017 tax overhaul.\n\n"
            "The person named in the claim cast the following vote:\n\n"
            "Bill: Tax Cuts and Jobs Act\n"
            "Summary: Rewrites the individual and corporate tax code.\n"
            "Vote: Yea\n"
        )

    def test_prompt_offers_all_four_labels_and_json_contract(self):
        prompt = build_alignment_prompt(CLAIM, BILL, "Nay")
        for label in AlignmentLabel:
            assert f"- {label.value}:" in prompt
        assert prompt.rstrip().endswith(
            'Reply with only a JSON object: {"Label": "<label>", "Explanation": "<why>"}'
        )


class TestAlignClaimBill:
    def test_well_formed_reply(self):
        transport, _ = scripted(label_reply("Supports", "the vote enacted it"))
        alignment = align_claim_bill(chat_gateway(transport), CLAIM, BILL, "Yea")
        assert alignment.label is AlignmentLabel.SUPPORTS
        assert alignment.explanation == "the vote enacted it"

    def test_keys_and_label_are_case_insensitive(self):
        transport, _ = scripted(json.dumps({"label": "refutes", "explanation": "x"}))
        alignment = align_claim_bill(chat_gateway(transport), CLAIM, BILL, "Nay")
        assert alignment.label is AlignmentLabel.REFUTES

    def test_code_fenced_reply_accepted(self):
        transport, _ = scripted("```json\n" + label_reply("Inconclusive") + "\n```")
        alignment = align_claim_bill(chat_gateway(transport), CLAIM, BILL, "Yea")
        assert alignment.label is AlignmentLabel.INCONCLUSIVE

    def test_unparseable_reply_gets_one_repair(self):
        transport, prompts = scripted("no json here", label_reply("Irrelevant"))
        alignment = align_claim_bill(chat_gateway(transport), CLAIM, BILL, "Yea")
        assert alignment.label is AlignmentLabel.IRRELEVANT
        assert len(prompts) == 2
        assert prompts[1].startswith(prompts[0])
        assert prompts[1].rstrip().endswith("Reply again exactly as instructed.")

    def test_unknown_label_counts_as_unparseable(self):
        transport, prompts = scripted(label_reply("Maybe"), label_reply("Supports"))
        alignment = align_claim_bill(chat_gateway(transport), CLAIM, BILL, "Yea")
        assert alignment.label is AlignmentLabel.SUPPORTS
        assert len(prompts) == 2

    def test_two_bad_replies_raise_with_raw_output(self):
        transport, _ = scripted("garbage one", "garbage two")
        with pytest.raises(VerificationError) as excinfo:
            align_claim_bill(chat_gateway(transport), CLAIM, BILL, "Yea")
        assert excinfo.value.raw_output == "garbage two"


class TestAggregateVoteVerdict:
    def test_prompt_numbers_each_vote_with_its_alignment(self):
        evidence = make_evidence(2)
        prompt = build_aggregate_prompt(CLAIM, evidence)
        assert "Bill 1: Bill 1\nSummary: s\nVote: Yea\n" in prompt
        assert "Relation to the claim: Supports - e1" in prompt
        assert "Bill 2: Bill 2" in prompt
        assert prompt.rstrip().endswith(
            'Reply with only a JSON object: {"Label": "<verdict>", "Explanation": "<why>"}'
        )

    def test_empty_evidence_rejected(self):
        transport, _ = scripted()
        with pytest.raises(ValueError, match="at least one evidence item"):
            aggregate_vote_verdict(chat_gateway(transport), CLAIM, [])

    def test_verdict_carries_bill_ids_in_order(self):
        evidence = make_evidence(3)
        transport, _ = scripted(label_reply("Mostly True"))
        verdict = aggregate_vote_verdict(chat_gateway(transport), CLAIM, evidence)
        assert verdict.label is VerdictLabel.MOSTLY_TRUE
        assert verdict.evidence_refs == ("b1-115", "b2-115", "b3-115")

    def test_evidence_capped_at_five_bills(self):
        evidence = make_evidence(7)
        transport, prompts = scripted(label_reply("True"))
        verdict = aggregate_vote_verdict(chat_gateway(transport), CLAIM, evidence)
        assert verdict.evidence_refs == tuple(f"b{i}-115" for i in range(1, 6))
        assert "Bill 5:" in prompts[0]
        assert "Bill 6:" not in prompts[0]

    def test_irrelevant_is_an_allowed_verdict(self):
        transport, _ = scripted(label_reply("Irrelevant"))
        verdict = aggregate_vote_verdict(chat_gateway(transport), CLAIM, make_evidence(1))
        assert verdict.label is VerdictLabel.IRRELEVANT

    def test_off_scale_label_triggers_repair(self):
        # Pants on Fire is an input-side rating, never a produced verdict
        transport, prompts = scripted(
            label_reply("Pants on Fire"), label_reply("False")
        )
        verdict = aggregate_vote_verdict(chat_gateway(transport), CLAIM, make_evidence(1))
        assert verdict.label is VerdictLabel.FALSE
        assert len(prompts) == 2


class TestParseVerdictLine:
    @pytest.mark.parametrize(
        ("reply", "label", "explanation"),
        [
            ("Verdict: True; Explanation: solid", VerdictLabel.TRUE, "solid"),
            (
                "Verdict: [Mostly False]; Explanation: [weak support]",
                VerdictLabel.MOSTLY_FALSE,
                "weak support",
            ),
            ("Verdict: Half-True. Explanation: mixed", VerdictLabel.HALF_TRUE, "mixed"),
            (
                "Thinking it over.\nVerdict: Mostly True; Explanation: close enough",
                VerdictLabel.MOSTLY_TRUE,
                "close enough",
            ),
        ],
    )
    def test_accepted_forms(self, reply, label, explanation):
        verdict = parse_verdict_line(reply)
        assert verdict is not None
        assert verdict.label is label
        assert verdict.explanation == explanation

    @pytest.mark.parametrize(
        "reply",
        [
            "Verdict: Pants on Fire; Explanation: nope",
            "Verdict: Irrelevant; Explanation: nope",
            "Verdict: Banana; Explanation: what",
            "no verdict line at all",
            "",
        ],
    )
    def test_rejected_forms(self, reply):
        assert parse_verdict_line(reply) is None


class TestOecdVerification:
    @pytest.fixture
    def frame(self, table_store):
        plan = QueryPlan(
            table_id="life_expectancy", filters=(), select_columns=("country", "value")
        )
        return execute_plan(table_store.get_table("life_expectancy"), plan)

    def test_prompt_embeds_tabular_evidence(self, frame):
        prompt = build_oecd_prompt(CLAIM, [frame])
        assert prompt.startswith("Assess the claim strictly against the data below.")
        assert "Data from table life_expectancy:\ncountry\tvalue\n" in prompt
        assert (
            "Verdict: [False, Mostly False, Half-True, Mostly True, True]; "
            "Explanation: [Your reasoning]" in prompt
        )

    def test_prompt_marks_truncated_frames(self, table_store):
        plan = QueryPlan(table_id="life_expectancy", filters=(), select_columns=())
        capped = execute_plan(table_store.get_table("life_expectancy"), plan, row_cap=3)
        prompt = build_oecd_prompt(CLAIM, [capped])
        assert "Data from table life_expectancy (truncated):" in prompt

    def test_empty_evidence_rejected(self, frame):
        transport, _ = scripted()
        with pytest.raises(ValueError, match="needs evidence"):
            verify_oecd(chat_gateway(transport), CLAIM, [])

    def test_verdict_references_the_tables(self, frame):
        transport, _ = scripted("Verdict: Mostly True; Explanation: data agrees")
        verdict = verify_oecd(chat_gateway(transport), CLAIM, [frame])
        assert verdict.label is VerdictLabel.MOSTLY_TRUE
        assert verdict.evidence_refs == ("life_expectancy",)

    def test_naive_verify_uses_no_evidence(self):
        transport, prompts = scripted("Verdict: False; Explanation: from memory")
        verdict = naive_verify(chat_gateway(transport), CLAIM)
        assert verdict.label is VerdictLabel.FALSE
        assert prompts[0].startswith(
            "Assess this claim using only what you know; no reference data is provided."
        )


def load_scoring_fixture(fixtures_dir):
    cases = json.loads((fixtures_dir / "gold" / "verify_cases.json").read_text())
    gold = [
        GoldRecord(
            claim=Claim(id=case["id"], text=f"claim {case['id']}"),
            gold_verdict=parse_verdict_label(case["gold"]),
            gold_bill_ids=("hr1-115",),
        )
        for case in cases
    ]
    predictions = [
        Prediction(
            claim_id=case["id"],
            verdict=Verdict(label=parse_verdict_label(case["predicted"])),
            evidence_available=case["evidence_available"],
        )
        for case in cases
    ]
    return predictions, gold


class TestScoreVerification:
    def test_fixture_report(self, fixtures_dir):
        predictions, gold = load_scoring_fixture(fixtures_dir)
        report = score_verification(predictions, gold)
        assert report.accuracy == pytest.approx(0.4)
        assert report.accuracy_wo_irrelevant == pytest.approx(0.5)
        assert report.n == 10
        assert report.n_excluded == 2
        assert report.n_irrelevant_predictions == 1
        # c2 exact hit plus c3's consolidated Pants-on-Fire gold
        assert report.confusion[("False", "False")] == 2

    def test_disabling_exclusion_keeps_every_claim(self, fixtures_dir):
        predictions, gold = load_scoring_fixture(fixtures_dir)
        report = score_verification(predictions, gold, exclude_no_evidence=False)
        assert report.n_excluded == 0
        assert report.accuracy_wo_irrelevant == pytest.approx(report.accuracy)

    def test_marginals_sum_to_n(self, fixtures_dir):
        predictions, gold = load_scoring_fixture(fixtures_dir)
        report = score_verification(predictions, gold)
        assert sum(report.gold_marginals().values()) == report.n
        assert sum(report.predicted_marginals().values()) == report.n

    def test_pants_on_fire_gold_consolidates_to_false(self):
        gold = [
            GoldRecord(
                claim=Claim(id="c1", text="t"),
                gold_verdict=VerdictLabel.PANTS_ON_FIRE,
                gold_bill_ids=("b1-115",),
            )
        ]
        predictions = [
            Prediction(claim_id="c1", verdict=Verdict(label=VerdictLabel.FALSE))
        ]
        report = score_verification(predictions, gold)
        assert report.accuracy == 1.0
        assert report.confusion == {("False", "False"): 1}

    def test_failed_stage_counts_as_incorrect_but_not_excluded(self):
        gold = [
            GoldRecord(
                claim=Claim(id="c1", text="t"),
                gold_verdict=VerdictLabel.TRUE,
                gold_bill_ids=("b1-115",),
            )
        ]
        predictions = [Prediction(claim_id="c1", verdict=None)]
        report = score_verification(predictions, gold)
        assert report.accuracy == 0.0
        assert report.n_excluded == 0
        assert report.confusion == {("True", "(none)"): 1}

    def test_mismatched_ids_rejected(self, fixtures_dir):
        predictions, gold = load_scoring_fixture(fixtures_dir)
        with pytest.raises(EvaluationError, match="do not match"):
            score_verification(predictions[:-1], gold)

    def test_empty_gold_rejected(self):
        with pytest.raises(EvaluationError):
            score_verification([], [])

    def test_duplicate_gold_ids_rejected(self):
        record = GoldRecord(
            claim=Claim(id="c1", text="t"),
            gold_verdict=VerdictLabel.TRUE,
            gold_bill_ids=("b1-115",),
        )
        prediction = Prediction(claim_id="c1", verdict=Verdict(label=VerdictLabel.TRUE))
        with pytest.raises(EvaluationError, match="duplicate"):
            score_verification([prediction], [record, record])
